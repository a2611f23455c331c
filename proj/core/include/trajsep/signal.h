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

#ifndef TRAJSEP_SIGNAL_H_
#define TRAJSEP_SIGNAL_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "trajsep/common.h"

namespace trajsep {

inline constexpr double kDefaultSampleRate = 16000.0;

// Frame grid shared by envelopes, framed trajectories and the STFT.
struct FrameGrid {
  std::size_t win = 256;
  std::size_t hop = 128;
};

// Number of full frames of length |win| spaced |hop| apart in |num_samples|.
// Zero when the signal is shorter than one window.
inline std::size_t FrameCount(std::size_t num_samples, const FrameGrid& grid) {
  if (num_samples < grid.win || grid.hop == 0) return 0;
  return 1 + (num_samples - grid.win) / grid.hop;
}

using MonoSignal = std::vector<double>;

// Ambisonic channel numbering (ACN order, SN3D normalization).
enum FoaChannel : int { kW = 0, kY = 1, kZ = 2, kX = 3 };

// First-order SN3D encoding gains for a unit direction, in ACN order.
inline std::array<double, 4> EncodeFirstOrder(const Vec3& dir) {
  return {1.0, dir.y, dir.z, dir.x};
}

// N x 4 block of first-order ambisonic audio. Channel 0 is the omnidirectional
// reference. Samples are stored frame-interleaved.
class FoaSignal {
 public:
  static constexpr int kNumChannels = 4;

  FoaSignal() = default;
  FoaSignal(std::size_t num_frames, double sample_rate)
      : num_frames_(num_frames),
        sample_rate_(sample_rate),
        samples_(num_frames * kNumChannels, 0.0) {}

  std::size_t num_frames() const { return num_frames_; }
  double sample_rate() const { return sample_rate_; }
  bool empty() const { return num_frames_ == 0; }

  double& at(std::size_t n, int ch) { return samples_[n * kNumChannels + ch]; }
  double at(std::size_t n, int ch) const {
    return samples_[n * kNumChannels + ch];
  }

  // Dipole channels of frame n as an XYZ vector.
  Vec3 Dipole(std::size_t n) const {
    const double* f = &samples_[n * kNumChannels];
    return {f[kX], f[kY], f[kZ]};
  }

  MonoSignal Channel(int ch) const;
  void SetChannel(int ch, std::span<const double> values);

  std::span<const double> interleaved() const { return samples_; }
  std::span<double> interleaved() { return samples_; }

  FoaSignal& operator+=(const FoaSignal& other);
  FoaSignal& operator*=(double gain);

  friend bool operator==(const FoaSignal&, const FoaSignal&) = default;

 private:
  std::size_t num_frames_ = 0;
  double sample_rate_ = kDefaultSampleRate;
  std::vector<double> samples_;
};

// Frame-rate nonnegative amplitude sequence (T values).
struct FrameEnvelope {
  std::vector<double> values;
  FrameGrid grid;
};

// Sample-rate nonnegative amplitude sequence (N values).
struct SampleEnvelope {
  std::vector<double> values;
  double sample_rate = kDefaultSampleRate;
};

// Per-sample source positions in room coordinates (meters).
struct PositionPath {
  std::vector<Vec3> positions;
};

// Per-sample unit direction vectors pointing from the array to a source.
struct Trajectory {
  std::vector<Vec3> dirs;
};

// Per-sample direction scaled by the source envelope.
struct IntensityTrajectory {
  std::vector<Vec3> vecs;
};

// Frame averages of an intensity trajectory on a FrameGrid.
struct FramedIntensityTrajectory {
  std::vector<Vec3> vecs;
  FrameGrid grid;
};

// Throws kValidation unless every row has unit norm within |tol|.
void CheckUnitRows(std::span<const Vec3> rows, double tol = 1e-6);

// Throws kValidation unless every sample of |signal| is finite.
void CheckFinite(const FoaSignal& signal);
void CheckFinite(std::span<const double> values);

// Peak absolute value.
double PeakAbs(std::span<const double> values);

}  // namespace trajsep

#endif  // TRAJSEP_SIGNAL_H_
