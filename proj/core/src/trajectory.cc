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

#include "trajsep/trajectory.h"

#include <string>

namespace trajsep {
namespace {

void CheckLengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " lengths differ: " +
                                               std::to_string(a) + " vs " +
                                               std::to_string(b));
  }
}

}  // namespace

IntensityTrajectory MakeIntensityTrajectory(const SampleEnvelope& env,
                                            const Trajectory& traj) {
  CheckLengths(env.values.size(), traj.dirs.size(), "envelope/trajectory");
  IntensityTrajectory out;
  out.vecs.resize(traj.dirs.size());
  for (std::size_t n = 0; n < traj.dirs.size(); ++n) {
    out.vecs[n] = traj.dirs[n] * env.values[n];
  }
  return out;
}

FramedIntensityTrajectory FrameIntensityTrajectory(const IntensityTrajectory& it,
                                                   const FrameGrid& grid) {
  if (grid.win == 0 || grid.hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window and hop must be > 0");
  }
  if (it.vecs.size() < grid.win) {
    throw Error(ErrorCode::kInvalidArgument,
                "intensity trajectory shorter than one window");
  }
  FramedIntensityTrajectory out;
  out.grid = grid;
  const std::size_t frames = FrameCount(it.vecs.size(), grid);
  out.vecs.resize(frames);
  const double inv = 1.0 / static_cast<double>(grid.win);
  for (std::size_t t = 0; t < frames; ++t) {
    Vec3 sum;
    for (std::size_t i = t * grid.hop; i < t * grid.hop + grid.win; ++i) {
      sum += it.vecs[i];
    }
    out.vecs[t] = sum * inv;
  }
  return out;
}

double TrajectoryLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                      std::span<const double> env) {
  CheckLengths(est.size(), trg.size(), "trajectory");
  CheckLengths(est.size(), env.size(), "trajectory/envelope");
  if (est.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  double sum = 0.0;
  for (std::size_t n = 0; n < est.size(); ++n) {
    const Vec3 d = (est[n] - trg[n]) * env[n];
    sum += SquaredNorm(d);
  }
  return sum / (3.0 * static_cast<double>(est.size()));
}

std::vector<Vec3> Differential(std::span<const Vec3> traj, std::size_t d) {
  if (d < 1 || d >= traj.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "differential scale " + std::to_string(d) + " outside [1, " +
                    std::to_string(traj.size()) + ")");
  }
  std::vector<Vec3> out(traj.size() - d);
  for (std::size_t n = d; n < traj.size(); ++n) out[n - d] = traj[n] - traj[n - d];
  return out;
}

double DifferentialLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                        int max_scale_exponent, bool clip_scales) {
  CheckLengths(est.size(), trg.size(), "trajectory");
  if (max_scale_exponent < 0 || max_scale_exponent > 62) {
    throw Error(ErrorCode::kInvalidArgument, "scale exponent must be in [0, 62]");
  }
  const std::size_t n = est.size();
  const std::size_t top = std::size_t{1} << max_scale_exponent;
  if (!clip_scales && top >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "largest scale 2^" + std::to_string(max_scale_exponent) +
                    " must be shorter than the trajectory (" + std::to_string(n) +
                    " samples)");
  }
  double total = 0.0;
  int used = 0;
  for (int i = 0; i <= max_scale_exponent; ++i) {
    const std::size_t d = std::size_t{1} << i;
    if (d >= n) break;
    // Direct form of the differential difference, without temporaries.
    double sum = 0.0;
    for (std::size_t k = d; k < n; ++k) {
      const Vec3 diff = (est[k] - est[k - d]) - (trg[k] - trg[k - d]);
      sum += SquaredNorm(diff);
    }
    total += sum / (3.0 * static_cast<double>(n - d));
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no differential scale fits the input");
  }
  return total / static_cast<double>(used);
}

double TrackingLoss(std::span<const Vec3> est, std::span<const Vec3> trg,
                    std::span<const double> env, const TrackLossConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !(cfg.beta >= 0.0) || cfg.max_scale_exponent < 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid tracking-loss config");
  }
  double loss = 0.0;
  if (cfg.alpha != 0.0) loss += cfg.alpha * TrajectoryLoss(est, trg, env);
  if (cfg.beta != 0.0) {
    loss += cfg.beta * DifferentialLoss(est, trg, cfg.max_scale_exponent,
                                        cfg.clip_scales);
  }
  return loss;
}

const SampleEnvelope& SelectLossEnvelope(const TrackLossConfig& cfg,
                                         const SampleEnvelope& estimated,
                                         const SampleEnvelope& groundtruth) {
  return cfg.weighting == LossWeighting::kEstimatedEnvelope ? estimated : groundtruth;
}

}  // namespace trajsep
