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

#ifndef TRAJSEP_TRAJECTORY_H_
#define TRAJSEP_TRAJECTORY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "trajsep/signal.h"

namespace trajsep {

// Row n = env(n) * traj(n).
IntensityTrajectory MakeIntensityTrajectory(const SampleEnvelope& env,
                                            const Trajectory& traj);

// Frame t = mean of rows [t * hop, t * hop + win).
FramedIntensityTrajectory FrameIntensityTrajectory(const IntensityTrajectory& it,
                                                   const FrameGrid& grid = {});

// Which envelope weights the intensity-trajectory loss. The estimated
// envelope weights both terms in the default form.
enum class LossWeighting { kEstimatedEnvelope, kGroundtruthEnvelope };

struct TrackLossConfig {
  double alpha = 0.5;
  double beta = 0.5;
  int max_scale_exponent = 10;  // D; scales 2^0 .. 2^D
  // Skip scales 2^i >= N instead of rejecting short inputs.
  bool clip_scales = false;
  LossWeighting weighting = LossWeighting::kEstimatedEnvelope;
};

// Mean over samples and the three components of (env(n) (est(n) - trg(n)))^2.
double TrajectoryLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                      std::span<const double> env);

// Rows traj(n) - traj(n - d) for n in [d, N).
std::vector<Vec3> Differential(std::span<const Vec3> traj, std::size_t d);

// Mean over scales d = 2^i, i in [0, D], of the per-component MSE between the
// differentials of est and trg.
double DifferentialLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                        int max_scale_exponent = 10, bool clip_scales = false);

// alpha * TrajectoryLoss + beta * DifferentialLoss. |env| is the weight
// selected by the caller (see SelectLossEnvelope).
double TrackingLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                    std::span<const double> env, const TrackLossConfig& cfg = {});

// Picks the weighting envelope named by cfg.weighting.
const SampleEnvelope& SelectLossEnvelope(const TrackLossConfig& cfg,
                                         const SampleEnvelope& estimated,
                                         const SampleEnvelope& groundtruth);

}  // namespace trajsep

#endif  // TRAJSEP_TRAJECTORY_H_
