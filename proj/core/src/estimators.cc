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

#include "trajsep/estimators.h"

#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "trajsep/envelope.h"
#include "trajsep/fft.h"

namespace trajsep {
namespace {

double FrameMean(std::span<const double> v, std::size_t t, const FrameGrid& grid) {
  double s = 0.0;
  for (std::size_t i = t * grid.hop; i < t * grid.hop + grid.win; ++i) s += v[i];
  return s / static_cast<double>(grid.win);
}

double FramePeak(const FoaSignal& x, int ch, std::size_t t, const FrameGrid& grid) {
  double p = 0.0;
  for (std::size_t i = t * grid.hop; i < t * grid.hop + grid.win; ++i) {
    p = std::max(p, std::abs(x.at(i, ch)));
  }
  return p;
}

// Splits sample n between its neighbouring frame anchors: returns the lower
// frame and the weight of the upper one.
std::pair<std::size_t, double> AnchorBlend(std::size_t n, std::size_t frames,
                                           const FrameGrid& grid) {
  const double pos = static_cast<double>(n);
  const double first = FrameAnchor(0, grid);
  if (frames == 1 || pos <= first) return {0, 0.0};
  const double last = FrameAnchor(frames - 1, grid);
  if (pos >= last) return {frames - 1, 0.0};
  const double u = (pos - first) / static_cast<double>(grid.hop);
  const std::size_t t = std::min(static_cast<std::size_t>(u), frames - 2);
  return {t, u - static_cast<double>(t)};
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

void CheckGroundtruth(const std::shared_ptr<const Groundtruth>& gt) {
  if (!gt || gt->images.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "oracle component needs groundtruth");
  }
}

FoaSignal OracleImage(const Groundtruth& gt, int src, const FoaSignal& mixture,
                      double leakage) {
  const FoaSignal& image = gt.images[static_cast<std::size_t>(src)];
  if (image.num_frames() != mixture.num_frames()) {
    throw Error(ErrorCode::kShapeMismatch, "groundtruth/mixture length mismatch");
  }
  FoaSignal out(mixture.num_frames(), mixture.sample_rate());
  auto dst = out.interleaved();
  auto img = image.interleaved();
  auto mix = mixture.interleaved();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double clean = gt.normalization * img[i];
    dst[i] = clean + (leakage != 0.0 ? leakage * (mix[i] - clean) : 0.0);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical tracker.

std::vector<Vec3> FrameIntensityVectors(const FoaSignal& signal, const FrameGrid& grid) {
  const std::size_t frames = FrameCount(signal.num_frames(), grid);
  std::vector<Vec3> out(frames);
  if (frames == 0) return out;
  RealFft fft(grid.win);
  std::vector<double> window(grid.win);
  for (std::size_t k = 0; k < grid.win; ++k) {
    window[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * k / static_cast<double>(grid.win));
  }
  std::vector<double> frame(grid.win);
  std::array<std::vector<std::complex<double>>, 4> spec;
  for (auto& s : spec) s.resize(fft.num_bins());
  for (std::size_t t = 0; t < frames; ++t) {
    for (int ch = 0; ch < 4; ++ch) {
      for (std::size_t k = 0; k < grid.win; ++k) {
        frame[k] = window[k] * signal.at(t * grid.hop + k, ch);
      }
      fft.Forward(frame, spec[ch]);
    }
    Vec3 intensity;
    const std::size_t bins = fft.num_bins();
    for (std::size_t f = 0; f < bins; ++f) {
      const double weight = (f == 0 || 2 * f == grid.win) ? 1.0 : 2.0;
      const std::complex<double> w = std::conj(spec[kW][f]);
      intensity.x += weight * std::real(w * spec[kX][f]);
      intensity.y += weight * std::real(w * spec[kY][f]);
      intensity.z += weight * std::real(w * spec[kZ][f]);
    }
    out[t] = intensity;
  }
  return out;
}

Trajectory PseudoIntensityTrack(const FoaSignal& signal, const SampleEnvelope& env,
                                const PseudoIntensityOptions& options) {
  const FrameGrid& grid = options.grid;
  const std::size_t n = signal.num_frames();
  if (env.values.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "envelope length != signal length");
  }
  const std::size_t frames = FrameCount(n, grid);
  if (frames == 0) {
    throw Error(ErrorCode::kInvalidArgument, "signal shorter than one frame");
  }
  const std::vector<Vec3> intensity = FrameIntensityVectors(signal, grid);

  std::vector<Vec3> dirs(frames);
  std::vector<double> weight(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const double e = FrameMean(env.values, t, grid);
    const double peak = FramePeak(signal, kW, t, grid);
    const double norm = Norm(intensity[t]);
    if (e < options.confidence_floor || !(norm > 0.0) || !(peak > 0.0)) continue;
    const double ratio = std::min(1.0, e / peak);
    dirs[t] = intensity[t] * (1.0 / norm);
    weight[t] = std::pow(ratio, options.selectivity) * e;
  }

  const std::size_t half = std::max<std::size_t>(options.smoothing, 1) / 2;
  std::vector<Vec3> smoothed(frames);
  std::vector<bool> resolved(frames, false);
  bool any = false;
  for (std::size_t t = 0; t < frames; ++t) {
    Vec3 acc;
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(frames - 1, t + half);
    for (std::size_t k = lo; k <= hi; ++k) acc += dirs[k] * weight[k];
    if (Norm(acc) > 0.0) {
      smoothed[t] = Normalized(acc);
      resolved[t] = true;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorCode::kInvalidArgument,
                "degenerate input: no frame carries a confident intensity vector");
  }
  // Unresolved frames inherit the nearest resolved one (earlier wins ties).
  std::vector<Vec3> filled = smoothed;
  for (std::size_t t = 0; t < frames; ++t) {
    if (resolved[t]) continue;
    for (std::size_t d = 1; d < frames; ++d) {
      if (t >= d && resolved[t - d]) {
        filled[t] = smoothed[t - d];
        break;
      }
      if (t + d < frames && resolved[t + d]) {
        filled[t] = smoothed[t + d];
        break;
      }
    }
  }

  Trajectory traj;
  traj.dirs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t, lambda] = AnchorBlend(i, frames, grid);
    Vec3 v = filled[t];
    if (lambda > 0.0) {
      const Vec3 mix = filled[t] * (1.0 - lambda) + filled[t + 1] * lambda;
      v = Norm(mix) > 1e-12 ? mix : (lambda < 0.5 ? filled[t] : filled[t + 1]);
    }
    traj.dirs[i] = Normalized(v);
  }
  return traj;
}

Trajectory PseudoIntensityTracker::Track(const FoaSignal& mixture,
                                         const SampleEnvelope& env,
                                         const FoaSignal* separated) const {
  return PseudoIntensityTrack(separated ? *separated : mixture, env, options_);
}

// ---------------------------------------------------------------------------
// Classical extractors.

SteeredExtraction SteeredExtract(const FoaSignal& mixture,
                                 const FramedIntensityTrajectory& fit) {
  const FrameGrid& grid = fit.grid;
  const std::size_t n = mixture.num_frames();
  const std::size_t frames = fit.vecs.size();
  if (frames == 0 || frames != FrameCount(n, grid)) {
    throw Error(ErrorCode::kShapeMismatch,
                "framed trajectory has " + std::to_string(frames) +
                    " frames; the mixture grid has " +
                    std::to_string(FrameCount(n, grid)));
  }
  SteeredExtraction out;
  out.signal = FoaSignal(n, mixture.sample_rate());

  std::vector<Vec3> steer(frames);
  std::vector<bool> omni(frames, false);
  std::vector<double> gain(frames, 0.0);
  auto beam = [&](std::size_t t, std::size_t i) {
    if (omni[t]) return mixture.at(i, kW);
    return 0.5 * (mixture.at(i, kW) + Dot(steer[t], mixture.Dipole(i)));
  };
  for (std::size_t t = 0; t < frames; ++t) {
    const double magnitude = Norm(fit.vecs[t]);
    if (magnitude > 0.0) {
      steer[t] = fit.vecs[t] * (1.0 / magnitude);
    } else {
      omni[t] = true;
      out.passthrough_frames.push_back(t);
    }
    double peak = 0.0;
    for (std::size_t i = t * grid.hop; i < t * grid.hop + grid.win; ++i) {
      peak = std::max(peak, std::abs(beam(t, i)));
    }
    gain[t] = peak > 0.0 ? std::min(1.0, magnitude / peak) : 0.0;
  }
  if (!out.passthrough_frames.empty()) {
    VLOG(1) << out.passthrough_frames.size()
            << " frames have no steering direction; omni pass-through";
  }

  auto add_frame = [&](std::size_t t, std::size_t i, double w) {
    if (w == 0.0 || gain[t] == 0.0) return;
    const double y = w * gain[t] * beam(t, i);
    const std::array<double, 4> enc =
        omni[t] ? std::array<double, 4>{1.0, 0.0, 0.0, 0.0} : EncodeFirstOrder(steer[t]);
    for (int ch = 0; ch < 4; ++ch) out.signal.at(i, ch) += y * enc[ch];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t, lambda] = AnchorBlend(i, frames, grid);
    add_frame(t, i, 1.0 - lambda);
    if (lambda > 0.0) add_frame(t + 1, i, lambda);
  }
  return out;
}

FoaSignal SteeredExtractor::Extract(const FoaSignal& mixture,
                                    const FramedIntensityTrajectory& fit) const {
  return SteeredExtract(mixture, fit).signal;
}

MonoSignal SteeredRefinementExtractor::Refine(const FoaSignal& mixture,
                                              const FoaSignal& separated,
                                              const FramedIntensityTrajectory& fit) const {
  if (separated.num_frames() != mixture.num_frames()) {
    throw Error(ErrorCode::kShapeMismatch, "separated/mixture length mismatch");
  }
  FramedIntensityTrajectory capped = fit;
  const std::size_t frames = std::min(fit.vecs.size(),
                                      FrameCount(separated.num_frames(), fit.grid));
  for (std::size_t t = 0; t < frames; ++t) {
    const double magnitude = Norm(fit.vecs[t]);
    const double cap = FramePeak(separated, kW, t, fit.grid);
    if (magnitude > cap && magnitude > 0.0) capped.vecs[t] *= cap / magnitude;
  }
  return SteeredExtract(mixture, capped).signal.Channel(kW);
}

// ---------------------------------------------------------------------------
// Groundtruth and oracles.

double NormalizationGain(const FoaSignal& mixture) {
  double peak = 0.0;
  for (std::size_t i = 0; i < mixture.num_frames(); ++i) {
    peak = std::max(peak, std::abs(mixture.at(i, kW)));
  }
  if (!(peak > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "silent mixture cannot be normalized");
  }
  return 1.0 / peak;
}

Groundtruth MakeGroundtruth(const FoaSignal& mixture, std::vector<FoaSignal> images,
                            std::vector<Trajectory> trajectories,
                            const FrameGrid& grid) {
  if (images.empty() || images.size() != trajectories.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "need one trajectory per groundtruth image");
  }
  Groundtruth gt;
  gt.grid = grid;
  gt.normalization = NormalizationGain(mixture);
  const std::size_t n = mixture.num_frames();
  MonoSignal w = mixture.Channel(kW);
  for (double& v : w) v *= gt.normalization;
  gt.mixture_envelope = ExtractEnvelope(w, grid);
  for (std::size_t c = 0; c < images.size(); ++c) {
    if (images[c].num_frames() != n || trajectories[c].dirs.size() != n) {
      throw Error(ErrorCode::kShapeMismatch,
                  "source " + std::to_string(c) + " length differs from the mixture");
    }
    CheckUnitRows(trajectories[c].dirs);
    MonoSignal ch0 = images[c].Channel(kW);
    for (double& v : ch0) v *= gt.normalization;
    gt.frame_envelopes.push_back(ExtractEnvelope(ch0, grid));
    gt.sample_envelopes.push_back(
        InterpolateToSamples(gt.frame_envelopes.back(), n, mixture.sample_rate()));
  }
  gt.images = std::move(images);
  gt.trajectories = std::move(trajectories);
  return gt;
}

int MatchSourceByEnvelope(const Groundtruth& gt, const SampleEnvelope& env) {
  int best = 0;
  double best_score = -INFINITY;
  for (int c = 0; c < gt.num_sources(); ++c) {
    const auto& ref = gt.sample_envelopes[static_cast<std::size_t>(c)].values;
    if (ref.size() != env.values.size()) {
      throw Error(ErrorCode::kShapeMismatch, "envelope length differs from groundtruth");
    }
    const double score = Cosine(env.values, ref);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

int MatchSourceByIntensity(const Groundtruth& gt, const FramedIntensityTrajectory& fit) {
  std::vector<double> magnitude(fit.vecs.size());
  for (std::size_t t = 0; t < fit.vecs.size(); ++t) magnitude[t] = Norm(fit.vecs[t]);
  int best = 0;
  double best_score = -INFINITY;
  for (int c = 0; c < gt.num_sources(); ++c) {
    const auto& ref = gt.frame_envelopes[static_cast<std::size_t>(c)].values;
    if (ref.size() != magnitude.size()) {
      throw Error(ErrorCode::kShapeMismatch, "frame count differs from groundtruth");
    }
    const double score = Cosine(magnitude, ref);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

Trajectory JitterTrajectory(const Trajectory& traj, double angle_deg,
                            std::uint64_t seed) {
  Trajectory out;
  out.dirs.resize(traj.dirs.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double theta = angle_deg * kPi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (std::size_t n = 0; n < traj.dirs.size(); ++n) {
    const Vec3& v = traj.dirs[n];
    Vec3 axis;
    do {
      const Vec3 r{gauss(rng), gauss(rng), gauss(rng)};
      axis = r - v * Dot(r, v);
    } while (Norm(axis) < 1e-6);
    axis = Normalized(axis);
    out.dirs[n] = Normalized(v * c + Cross(axis, v) * s);
  }
  return out;
}

std::vector<FrameEnvelope> OracleEnvelopeEstimator::Estimate(const FoaSignal& mixture,
                                                             int c_max,
                                                             const FrameGrid& grid) const {
  CheckGroundtruth(gt_);
  if (c_max < 1) throw Error(ErrorCode::kInvalidArgument, "c_max must be >= 1");
  if (grid.win != gt_->grid.win || grid.hop != gt_->grid.hop) {
    throw Error(ErrorCode::kInvalidArgument, "frame grid differs from groundtruth");
  }
  const std::size_t frames = FrameCount(mixture.num_frames(), grid);
  std::vector<FrameEnvelope> out;
  for (int c = 0; c < c_max; ++c) {
    if (c < gt_->num_sources()) {
      out.push_back(gt_->frame_envelopes[static_cast<std::size_t>(c)]);
      if (out.back().values.size() != frames) {
        throw Error(ErrorCode::kShapeMismatch, "mixture differs from groundtruth");
      }
    } else {
      out.push_back({std::vector<double>(frames, 0.0), grid});
    }
  }
  if (options_.envelope_sigma > 0.0) {
    std::mt19937_64 rng(DeriveSeed(options_.seed, 0xE5E));
    std::normal_distribution<double> gauss(0.0, options_.envelope_sigma);
    for (FrameEnvelope& e : out) {
      for (double& v : e.values) v = std::max(0.0, v + gauss(rng));
    }
  }
  return out;
}

Trajectory OracleTracker::Track(const FoaSignal& mixture, const SampleEnvelope& env,
                                const FoaSignal* separated) const {
  CheckGroundtruth(gt_);
  if (env.values.size() != mixture.num_frames()) {
    throw Error(ErrorCode::kShapeMismatch, "envelope length != mixture length");
  }
  const int src = MatchSourceByEnvelope(*gt_, env);
  const Trajectory& truth = gt_->trajectories[static_cast<std::size_t>(src)];
  const double sigma =
      options_.jitter_deg * (separated ? options_.separated_jitter_factor : 1.0);
  if (sigma == 0.0) return truth;
  return JitterTrajectory(
      truth, sigma,
      DeriveSeed(options_.seed, 2 * static_cast<std::uint64_t>(src) + (separated ? 1 : 0)));
}

FoaSignal OracleExtractor::Extract(const FoaSignal& mixture,
                                   const FramedIntensityTrajectory& fit) const {
  CheckGroundtruth(gt_);
  return OracleImage(*gt_, MatchSourceByIntensity(*gt_, fit), mixture, options_.leakage);
}

MonoSignal OracleRefinementExtractor::Refine(const FoaSignal& mixture,
                                             const FoaSignal& /*separated*/,
                                             const FramedIntensityTrajectory& fit) const {
  CheckGroundtruth(gt_);
  return OracleImage(*gt_, MatchSourceByIntensity(*gt_, fit), mixture, options_.leakage)
      .Channel(kW);
}

// ---------------------------------------------------------------------------
// Registry.

void CheckComponentNames(const ComponentNames& names) {
  const auto check = [](const std::string& role, const std::string& name,
                        std::initializer_list<const char*> known) {
    for (const char* k : known) {
      if (name == k) return;
    }
    throw Error(ErrorCode::kNotFound, "unknown component '" + name + "' for role " + role);
  };
  check("envelope", names.envelope, {"oracle"});
  check("tracker", names.tracker, {"pseudo-intensity", "oracle"});
  check("extractor", names.extractor, {"steered", "oracle"});
  check("refiner", names.refiner, {"steered", "oracle"});
}

ComponentSet MakeComponents(const ComponentNames& names,
                            std::shared_ptr<const Groundtruth> gt,
                            const OracleOptions& oracle,
                            const PseudoIntensityOptions& tracking) {
  CheckComponentNames(names);
  auto need_gt = [&](const std::string& role) {
    if (!gt) {
      throw Error(ErrorCode::kInvalidArgument,
                  "oracle " + role + " requires groundtruth");
    }
  };
  auto unknown = [](const std::string& role, const std::string& name) {
    return Error(ErrorCode::kNotFound,
                 "unknown component '" + name + "' for role " + role);
  };
  ComponentSet set;
  if (names.envelope == "oracle") {
    need_gt("envelope");
    set.envelope = std::make_shared<OracleEnvelopeEstimator>(gt, oracle);
  } else {
    throw unknown("envelope", names.envelope);
  }
  if (names.tracker == "pseudo-intensity") {
    set.tracker = std::make_shared<PseudoIntensityTracker>(tracking);
  } else if (names.tracker == "oracle") {
    need_gt("tracker");
    set.tracker = std::make_shared<OracleTracker>(gt, oracle);
  } else {
    throw unknown("tracker", names.tracker);
  }
  if (names.extractor == "steered") {
    set.extractor = std::make_shared<SteeredExtractor>();
  } else if (names.extractor == "oracle") {
    need_gt("extractor");
    set.extractor = std::make_shared<OracleExtractor>(gt, oracle);
  } else {
    throw unknown("extractor", names.extractor);
  }
  if (names.refiner == "steered") {
    set.refiner = std::make_shared<SteeredRefinementExtractor>();
  } else if (names.refiner == "oracle") {
    need_gt("refiner");
    set.refiner = std::make_shared<OracleRefinementExtractor>(gt, oracle);
  } else {
    throw unknown("refiner", names.refiner);
  }
  return set;
}

ComponentNames ParseComponentNames(const std::string& spec) {
  ComponentNames names;
  if (spec == "oracle") return {"oracle", "oracle", "oracle", "oracle"};
  if (spec == "classical" || spec.empty()) return names;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kNotFound, "unknown component '" + item + "'");
    }
    const std::string role = item.substr(0, eq);
    const std::string name = item.substr(eq + 1);
    if (role == "envelope") {
      names.envelope = name;
    } else if (role == "tracker") {
      names.tracker = name;
    } else if (role == "extractor") {
      names.extractor = name;
    } else if (role == "refiner") {
      names.refiner = name;
    } else {
      throw Error(ErrorCode::kNotFound, "unknown component role '" + role + "'");
    }
  }
  return names;
}

}  // namespace trajsep
