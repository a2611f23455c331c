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

#include "trajsep/envelope.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajsep/metrics.h"

namespace trajsep {
namespace {

double SumSquares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void CheckSameLength(const FrameEnvelope& a, const FrameEnvelope& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "envelope frame counts differ: " + std::to_string(a.values.size()) +
                    " vs " + std::to_string(b.values.size()));
  }
}

}  // namespace

FrameEnvelope ExtractEnvelope(std::span<const double> mono, const FrameGrid& grid) {
  if (grid.win == 0 || grid.hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window and hop must be > 0");
  }
  if (mono.size() < grid.win) {
    throw Error(ErrorCode::kInvalidArgument,
                "signal of " + std::to_string(mono.size()) +
                    " samples is shorter than one window");
  }
  FrameEnvelope env;
  env.grid = grid;
  const std::size_t frames = FrameCount(mono.size(), grid);
  env.values.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double peak = 0.0;
    const std::size_t begin = t * grid.hop;
    for (std::size_t i = begin; i < begin + grid.win; ++i) {
      peak = std::max(peak, std::abs(mono[i]));
    }
    env.values[t] = peak;
  }
  return env;
}

SampleEnvelope InterpolateToSamples(const FrameEnvelope& env, std::size_t n_samples,
                                    double sample_rate) {
  const std::size_t frames = env.values.size();
  if (frames < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "interpolation needs at least two frames");
  }
  SampleEnvelope out;
  out.sample_rate = sample_rate;
  out.values.resize(n_samples);
  const double first = FrameAnchor(0, env.grid);
  const double last = FrameAnchor(frames - 1, env.grid);
  const double hop = static_cast<double>(env.grid.hop);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double pos = static_cast<double>(n);
    if (pos <= first) {
      out.values[n] = env.values.front();
    } else if (pos >= last) {
      out.values[n] = env.values.back();
    } else {
      const double u = (pos - first) / hop;
      const std::size_t t = std::min(static_cast<std::size_t>(u), frames - 2);
      const double frac = u - static_cast<double>(t);
      out.values[n] = (1.0 - frac) * env.values[t] + frac * env.values[t + 1];
    }
  }
  return out;
}

double NmseLoss(const FrameEnvelope& est, const FrameEnvelope& trg) {
  CheckSameLength(est, trg);
  const double energy = SumSquares(trg.values);
  if (!(energy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "zero-energy target envelope; use the inactive loss");
  }
  double err = 0.0;
  for (std::size_t t = 0; t < est.values.size(); ++t) {
    const double d = est.values[t] - trg.values[t];
    err += d * d;
  }
  if (err == 0.0) return -kDbCap;
  return std::max(-kDbCap, 10.0 * std::log10(err / energy));
}

double NmseLoss(std::span<const FrameEnvelope> est,
                std::span<const FrameEnvelope> trg) {
  if (est.size() != trg.size() || est.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "envelope set sizes differ or are empty");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < est.size(); ++c) total += NmseLoss(est[c], trg[c]);
  return total / static_cast<double>(est.size());
}

double InactiveEnvelopeLoss(const FrameEnvelope& est, const FrameEnvelope& mix_env,
                            double tau) {
  CheckSameLength(est, mix_env);
  const double inner = SumSquares(est.values) + tau * SumSquares(mix_env.values);
  if (inner == 0.0) return -kDbCap;
  return std::max(-kDbCap, 10.0 * std::log10(inner));
}

EnvelopeSetLoss ComputeEnvelopeSetLoss(std::span<const FrameEnvelope> est,
                                       std::span<const FrameEnvelope> trg,
                                       const FrameEnvelope& mix_env, double tau) {
  const std::size_t c_max = est.size();
  if (trg.size() > c_max) {
    throw Error(ErrorCode::kInvalidArgument,
                "more targets (" + std::to_string(trg.size()) +
                    ") than estimate channels (" + std::to_string(c_max) + ")");
  }
  if (c_max == 0 || c_max > kMaxAssignmentSize) {
    throw Error(ErrorCode::kInvalidArgument, "estimate channel count must be 1..8");
  }
  std::vector<double> cost(c_max * c_max);
  for (std::size_t i = 0; i < c_max; ++i) {
    for (std::size_t j = 0; j < c_max; ++j) {
      cost[i * c_max + j] = j < trg.size() ? NmseLoss(est[i], trg[j])
                                           : InactiveEnvelopeLoss(est[i], mix_env, tau);
    }
  }
  const Assignment best = UpitAssign(cost, c_max);
  return {best.cost / static_cast<double>(c_max), best.perm};
}

SourceCount EstimateSourceCount(std::span<const FrameEnvelope> est, double threshold) {
  SourceCount out;
  out.active.reserve(est.size());
  for (const FrameEnvelope& e : est) {
    const bool active = PeakAbs(e.values) >= threshold;
    out.active.push_back(active);
    out.count += active ? 1 : 0;
  }
  return out;
}

}  // namespace trajsep
