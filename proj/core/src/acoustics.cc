/*
Copyright 2026 The trajsep Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "trajsep/acoustics.h"

#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <random>

#include "trajsep/fft.h"

namespace trajsep {
namespace {

constexpr double kMixGrid = 68719476736.0;  // 2^36
constexpr double kMixLimit = 4096.0;        // keeps grid sums within 53 bits

int ReflectionCount(int n, int u) { return std::abs(n - u) + std::abs(n); }

// Spectra of the four RIR channels at one FFT size.
struct RirSpectra {
  std::array<std::vector<std::complex<double>>, 4> bins;
  std::size_t length = 0;
};

RirSpectra TransformRir(const FoaRir& rir, RealFft& fft) {
  RirSpectra out;
  out.length = rir.length();
  for (int ch = 0; ch < 4; ++ch) {
    out.bins[ch].resize(fft.num_bins());
    fft.Forward(rir.taps[ch], out.bins[ch]);
  }
  return out;
}

}  // namespace

Absorption SabineAbsorption(const RoomSpec& room) {
  if (room.t60 < 0.0 || std::isnan(room.t60)) {
    throw Error(ErrorCode::kInvalidArgument, "t60 must be >= 0");
  }
  if (room.t60 == 0.0) return {1.0, false};
  const Vec3& d = room.dims;
  const double volume = d.x * d.y * d.z;
  const double surface = 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
  const double alpha = 0.161 * volume / (room.t60 * surface);
  if (alpha > 1.0) {
    LOG(WARNING) << "room too small for T60 " << room.t60
                 << " s; absorption clamped to 1 (required " << alpha << ")";
    return {1.0, true};
  }
  return {alpha, false};
}

int DefaultMaxOrder(const RoomSpec& room, int cap) {
  if (room.t60 == 0.0) return 0;
  const double min_dim = std::min({room.dims.x, room.dims.y, room.dims.z});
  const double reach = kSpeedOfSound * 1.5 * room.t60;
  const int order = static_cast<int>(std::ceil(reach / min_dim));
  return std::clamp(order, 0, cap);
}

FoaRir ComputeFoaRir(const RoomSpec& room, const Vec3& src_pos, int max_order,
                     double sample_rate) {
  if (max_order < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_order must be >= 0");
  }
  for (int a = 0; a < 3; ++a) {
    if (!(src_pos[a] > 0.0 && src_pos[a] < room.dims[a])) {
      throw Error(ErrorCode::kValidation, "source position outside the room");
    }
  }
  if (Norm(src_pos - room.array_center) < 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "source coincides with the array center (zero distance)");
  }
  const double reflect = max_order > 0 ? 1.0 - SabineAbsorption(room).alpha : 0.0;

  struct Image {
    double delay;
    double gain;
    Vec3 dir;
  };
  std::vector<Image> images;
  const int k = max_order;
  for (int nx = -k; nx <= k; ++nx) {
    for (int ux = 0; ux <= 1; ++ux) {
      const int rx = ReflectionCount(nx, ux);
      if (rx > k) continue;
      for (int ny = -k; ny <= k; ++ny) {
        for (int uy = 0; uy <= 1; ++uy) {
          const int ry = ReflectionCount(ny, uy);
          if (rx + ry > k) continue;
          for (int nz = -k; nz <= k; ++nz) {
            for (int uz = 0; uz <= 1; ++uz) {
              const int rz = ReflectionCount(nz, uz);
              const int order = rx + ry + rz;
              if (order > k) continue;
              const Vec3 img{(1 - 2 * ux) * src_pos.x + 2 * nx * room.dims.x,
                             (1 - 2 * uy) * src_pos.y + 2 * ny * room.dims.y,
                             (1 - 2 * uz) * src_pos.z + 2 * nz * room.dims.z};
              const Vec3 rel = img - room.array_center;
              const double r = Norm(rel);
              const double gain = (order == 0 ? 1.0 : std::pow(reflect, order)) / r;
              if (gain == 0.0) continue;
              images.push_back({r * sample_rate / kSpeedOfSound, gain, rel * (1.0 / r)});
            }
          }
        }
      }
    }
  }

  double max_delay = 0.0;
  for (const Image& im : images) max_delay = std::max(max_delay, im.delay);
  const std::size_t length = static_cast<std::size_t>(std::floor(max_delay)) + 2;

  FoaRir rir;
  rir.sample_rate = sample_rate;
  for (auto& ch : rir.taps) ch.assign(length, 0.0);
  for (const Image& im : images) {
    const double base = std::floor(im.delay);
    const double frac = im.delay - base;
    const std::size_t i = static_cast<std::size_t>(base);
    const std::array<double, 4> sh = EncodeFirstOrder(im.dir);
    for (int ch = 0; ch < 4; ++ch) {
      rir.taps[ch][i] += im.gain * sh[ch] * (1.0 - frac);
      rir.taps[ch][i + 1] += im.gain * sh[ch] * frac;
    }
  }
  return rir;
}

FoaSignal ConvolveRir(std::span<const double> signal, const FoaRir& rir) {
  const std::size_t n = signal.size();
  const std::size_t l = rir.length();
  if (n == 0 || l == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty signal or RIR");
  }
  const std::size_t out_len = n + l - 1;
  RealFft fft(NextPowerOfTwo(out_len));
  std::vector<std::complex<double>> x(fft.num_bins()), y(fft.num_bins());
  std::vector<double> time(fft.size());
  fft.Forward(signal, x);
  FoaSignal out(out_len, rir.sample_rate);
  const double scale = 1.0 / static_cast<double>(fft.size());
  for (int ch = 0; ch < 4; ++ch) {
    fft.Forward(rir.taps[ch], y);
    for (std::size_t b = 0; b < y.size(); ++b) y[b] *= x[b];
    fft.Inverse(y, time);
    for (std::size_t i = 0; i < out_len; ++i) out.at(i, ch) = time[i] * scale;
  }
  return out;
}

FoaSignal RenderMovingSource(std::span<const double> signal,
                             const PositionPath& path, const RoomSpec& room,
                             int max_order, const BlockConfig& block,
                             double sample_rate) {
  const std::size_t n = signal.size();
  if (path.positions.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "trajectory length " + std::to_string(path.positions.size()) +
                    " != signal length " + std::to_string(n));
  }
  if (block.hop == 0 || block.block != 2 * block.hop) {
    throw Error(ErrorCode::kInvalidArgument,
                "block length must be twice the hop for the linear crossfade");
  }
  CheckFinite(signal);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      if (!(path.positions[i][a] > 0.0 && path.positions[i][a] < room.dims[a])) {
        throw Error(ErrorCode::kValidation,
                    "trajectory leaves the room at sample " + std::to_string(i));
      }
    }
  }
  FoaSignal out(n, sample_rate);
  if (n == 0) return out;

  const std::size_t hop = block.hop;
  const std::size_t len = block.block;
  std::map<std::size_t, std::unique_ptr<RealFft>> ffts;
  std::vector<double> segment(len);
  std::vector<std::complex<double>> seg_bins, prod;
  std::vector<double> time;

  Vec3 cached_pos{-1.0, -1.0, -1.0};
  std::size_t cached_fft = 0;
  RirSpectra cached;

  // Block b covers [(b - 1) * hop, (b + 1) * hop).
  const std::size_t num_blocks = (n + hop - 1) / hop + 1;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::ptrdiff_t start =
        static_cast<std::ptrdiff_t>(b * hop) - static_cast<std::ptrdiff_t>(hop);
    bool any = false;
    for (std::size_t k = 0; k < len; ++k) {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(k);
      const double w = k <= hop ? static_cast<double>(k) / hop
                                : 2.0 - static_cast<double>(k) / hop;
      segment[k] = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
                       ? w * signal[static_cast<std::size_t>(idx)]
                       : 0.0;
      any = any || segment[k] != 0.0;
    }
    if (!any) continue;
    const std::size_t center = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        start + static_cast<std::ptrdiff_t>(hop), 0,
        static_cast<std::ptrdiff_t>(n) - 1));
    const Vec3& pos = path.positions[center];

    if (!(pos == cached_pos)) {
      const FoaRir rir = ComputeFoaRir(room, pos, max_order, sample_rate);
      const std::size_t size = NextPowerOfTwo(len + rir.length() - 1);
      auto& slot = ffts[size];
      if (!slot) slot = std::make_unique<RealFft>(size);
      cached = TransformRir(rir, *slot);
      cached_fft = size;
      cached_pos = pos;
    }
    RealFft& fft = *ffts[cached_fft];
    seg_bins.resize(fft.num_bins());
    prod.resize(fft.num_bins());
    time.resize(fft.size());
    fft.Forward(segment, seg_bins);
    const double scale = 1.0 / static_cast<double>(fft.size());
    const std::size_t produced = len + cached.length - 1;
    for (int ch = 0; ch < 4; ++ch) {
      for (std::size_t i = 0; i < prod.size(); ++i) {
        prod[i] = seg_bins[i] * cached.bins[ch][i];
      }
      fft.Inverse(prod, time);
      for (std::size_t k = 0; k < produced; ++k) {
        const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(k);
        if (idx < 0) continue;
        if (idx >= static_cast<std::ptrdiff_t>(n)) break;
        out.at(static_cast<std::size_t>(idx), ch) += time[k] * scale;
      }
    }
  }
  return out;
}

void QuantizeToMixGrid(FoaSignal& signal) {
  for (double& v : signal.interleaved()) {
    if (!(std::abs(v) < kMixLimit)) {
      throw Error(ErrorCode::kValidation,
                  "sample magnitude exceeds the mixing range (|x| < 4096)");
    }
    v = std::nearbyint(v * kMixGrid) / kMixGrid;
  }
}

Mixture MixScene(std::vector<FoaSignal> per_source, double noise_snr_db,
                 std::uint64_t seed) {
  if (per_source.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no sources to mix");
  }
  const std::size_t n = per_source.front().num_frames();
  const double fs = per_source.front().sample_rate();
  for (const FoaSignal& s : per_source) {
    if (s.num_frames() != n || s.sample_rate() != fs) {
      throw Error(ErrorCode::kShapeMismatch,
                  "sources differ in length or sample rate");
    }
  }
  if (std::isnan(noise_snr_db) || noise_snr_db == -INFINITY) {
    throw Error(ErrorCode::kInvalidArgument, "noise SNR must be a number or +inf");
  }
  Mixture out;
  out.mixture = FoaSignal(n, fs);
  for (FoaSignal& s : per_source) {
    QuantizeToMixGrid(s);
    out.mixture += s;
  }
  out.noise = FoaSignal(n, fs);
  if (!std::isinf(noise_snr_db)) {
    double signal_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      signal_power += out.mixture.at(i, kW) * out.mixture.at(i, kW);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : out.noise.interleaved()) v = gauss(rng);
    double noise_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      noise_power += out.noise.at(i, kW) * out.noise.at(i, kW);
    }
    const double gain =
        (signal_power > 0.0 && noise_power > 0.0)
            ? std::sqrt(signal_power / (noise_power * std::pow(10.0, noise_snr_db / 10.0)))
            : 0.0;
    out.noise *= gain;
    QuantizeToMixGrid(out.noise);
    out.mixture += out.noise;
  }
  out.images = std::move(per_source);
  return out;
}

}  // namespace trajsep
