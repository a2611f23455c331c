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

#ifndef TRAJSEP_ACOUSTICS_H_
#define TRAJSEP_ACOUSTICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trajsep/scene.h"
#include "trajsep/signal.h"

namespace trajsep {

struct Absorption {
  double alpha = 0.0;    // uniform energy absorption coefficient of every wall
  bool clamped = false;  // requested T60 needs alpha > 1
};

// Sabine estimate alpha = 0.161 V / (T60 S), clamped to 1 with a warning.
// A T60 of 0 denotes an anechoic room (alpha = 1).
Absorption SabineAbsorption(const RoomSpec& room);

// Four-channel (ACN/SN3D) room impulse response, one tap vector per channel.
struct FoaRir {
  std::array<std::vector<double>, 4> taps;
  double sample_rate = kDefaultSampleRate;

  std::size_t length() const { return taps[0].size(); }
};

// Image-source RIR seen by the ambisonic array at room.array_center. Each
// image of total reflection order k <= max_order contributes
// (1 - alpha)^k / r at delay r * fs / c, split over two taps by linear
// interpolation and weighted by the first-order gains of its direction.
FoaRir ComputeFoaRir(const RoomSpec& room, const Vec3& src_pos, int max_order,
                     double sample_rate = kDefaultSampleRate);

// Smallest image order whose shell reaches 1.5 * T60 of propagation,
// limited to |cap|.
int DefaultMaxOrder(const RoomSpec& room, int cap = 10);

struct BlockConfig {
  std::size_t block = 512;
  std::size_t hop = 256;  // block must equal 2 * hop
};

// Time-varying rendering: the signal is split into triangular-windowed blocks
// (the windows sum to one), each block is convolved with the RIR at its
// block-center position, and the results are overlap-added. The output is
// truncated to the input length.
FoaSignal RenderMovingSource(std::span<const double> signal,
                             const PositionPath& path, const RoomSpec& room,
                             int max_order, const BlockConfig& block = {},
                             double sample_rate = kDefaultSampleRate);

// Full-length (N + L - 1) convolution of a mono signal with one RIR.
FoaSignal ConvolveRir(std::span<const double> signal, const FoaRir& rir);

struct Mixture {
  FoaSignal mixture;
  std::vector<FoaSignal> images;  // clean per-source images
  FoaSignal noise;                // injected sensor noise
};

// Adds the clean images and white Gaussian sensor noise scaled to
// |noise_snr_db| on channel 0 (+inf disables noise). Images and noise are
// snapped to a 2^-36 grid so every sum below is exact: mixture minus the sum
// of images reproduces the noise bit for bit, in any summation order.
Mixture MixScene(std::vector<FoaSignal> per_source, double noise_snr_db,
                 std::uint64_t seed);

// Snaps samples to the 2^-36 grid used by MixScene.
void QuantizeToMixGrid(FoaSignal& signal);

}  // namespace trajsep

#endif  // TRAJSEP_ACOUSTICS_H_
