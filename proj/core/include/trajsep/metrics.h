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

#ifndef TRAJSEP_METRICS_H_
#define TRAJSEP_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "trajsep/common.h"
#include "trajsep/signal.h"

namespace trajsep {

// 10 log10(sum trg^2 / sum (est - trg)^2), capped at +/-100 dB.
double SnrDb(std::span<const double> est, std::span<const double> trg);

// Scale-invariant SNR: est is projected onto trg with the optimal scalar.
double SiSnrDb(std::span<const double> est, std::span<const double> trg);

inline constexpr std::size_t kDefaultSdrFilterLength = 512;

// Distortion-tolerant SDR: est is projected by least squares onto the span of
// trg delayed by 0 .. filter_len - 1 samples. filter_len == 1 is SiSnrDb.
double SdrDb(std::span<const double> est, std::span<const double> trg,
             std::size_t filter_len = kDefaultSdrFilterLength);

// Angle between two nonzero vectors in degrees, in [0, 180].
double AngularErrorDeg(const Vec3& u, const Vec3& v);

// Energy-weighted RMS angular error (degrees), integrated per sample:
// sqrt(sum env^2 AE^2 / sum env^2).
double EwrmsaeDeg(std::span<const Vec3> est, std::span<const Vec3> trg,
                  std::span<const double> trg_env);

struct Assignment {
  std::vector<int> perm;  // perm[row] = assigned column
  double cost = 0.0;
};

inline constexpr std::size_t kMaxAssignmentSize = 8;

// Exhaustive minimum-cost assignment of rows to columns of a square matrix
// (row-major, C x C, C <= 8). Ties resolve to the lexicographically smallest
// permutation.
Assignment UpitAssign(std::span<const double> cost, std::size_t size);
Assignment UpitAssign(const std::vector<std::vector<double>>& cost);

}  // namespace trajsep

#endif  // TRAJSEP_METRICS_H_
