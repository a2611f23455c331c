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

#ifndef TRAJSEP_ENVELOPE_H_
#define TRAJSEP_ENVELOPE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "trajsep/signal.h"

namespace trajsep {

// Frame t holds max |x| over samples [t * hop, t * hop + win).
FrameEnvelope ExtractEnvelope(std::span<const double> mono,
                              const FrameGrid& grid = {});

// Sample index at which frame t is anchored (the window center).
inline double FrameAnchor(std::size_t t, const FrameGrid& grid) {
  return static_cast<double>(t * grid.hop) + 0.5 * static_cast<double>(grid.win);
}

// Piecewise-linear interpolation through the frame anchors, held constant
// before the first and after the last anchor. Requires at least two frames.
SampleEnvelope InterpolateToSamples(const FrameEnvelope& env,
                                    std::size_t n_samples,
                                    double sample_rate = kDefaultSampleRate);

// Mean over sources of 10 log10(sum (est - trg)^2 / sum trg^2), floored at
// -100 dB. Every target must carry energy.
double NmseLoss(std::span<const FrameEnvelope> est,
                std::span<const FrameEnvelope> trg);

// NMSE of a single source pair (same flooring).
double NmseLoss(const FrameEnvelope& est, const FrameEnvelope& trg);

inline constexpr double kInactiveTau = 0.01;

// Loss against an all-zero target: 10 log10(sum est^2 + tau sum mix^2),
// floored at -100 dB.
double InactiveEnvelopeLoss(const FrameEnvelope& est, const FrameEnvelope& mix_env,
                            double tau = kInactiveTau);

struct EnvelopeSetLoss {
  double loss_db = 0.0;
  // perm[i] is the padded target slot assigned to estimate i; slots >= the
  // active count are the zero targets.
  std::vector<int> perm;
};

// Pads |trg| with zero envelopes up to est.size() (= C_max), scores each
// (estimate, slot) pair with the NMSE or inactive loss, and returns the
// minimum mean loss over all assignments.
EnvelopeSetLoss ComputeEnvelopeSetLoss(std::span<const FrameEnvelope> est,
                                       std::span<const FrameEnvelope> trg,
                                       const FrameEnvelope& mix_env,
                                       double tau = kInactiveTau);

inline constexpr double kCountThreshold = 0.25;

struct SourceCount {
  int count = 0;
  std::vector<bool> active;
};

// A channel is active iff its peak value is >= threshold.
SourceCount EstimateSourceCount(std::span<const FrameEnvelope> est,
                                double threshold = kCountThreshold);

}  // namespace trajsep

#endif  // TRAJSEP_ENVELOPE_H_
