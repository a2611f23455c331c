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

#include "trajsep/metrics.h"

#include <glog/logging.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace trajsep {
namespace {

void CheckSameLength(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "signal lengths differ: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
}

double Energy(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double ResidualRatioDb(double projection_energy, double residual_energy) {
  if (residual_energy == 0.0) return projection_energy > 0.0 ? kDbCap : -kDbCap;
  return RatioToCappedDb(projection_energy / residual_energy);
}

// Projects est onto span{trg delayed by 0..taps-1} and returns the
// projection-to-residual energy ratio in dB.
double ProjectionDb(std::span<const double> est, std::span<const double> trg,
                    std::size_t taps) {
  CheckSameLength(est, trg);
  const std::size_t n = trg.size();
  if (Energy(trg) == 0.0 || Energy(est) == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "zero-energy signal");
  }
  if (taps == 0 || taps > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "filter length must be in [1, signal length]");
  }

  std::vector<double> coeffs(taps);
  if (taps == 1) {
    double cross = 0.0;
    double auto_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cross += est[i] * trg[i];
      auto_energy += trg[i] * trg[i];
    }
    coeffs[0] = cross / auto_energy;
  } else {
    // Gram matrix of the truncated delayed targets. Entry (i, j), i <= j,
    // sums trg(m + j - i) trg(m) over m < n - j, so each diagonal follows
    // from its first element by peeling off tail terms.
    Eigen::MatrixXd gram(taps, taps);
    for (std::size_t lag = 0; lag < taps; ++lag) {
      double s = 0.0;
      for (std::size_t m = 0; m + lag < n; ++m) s += trg[m + lag] * trg[m];
      gram(0, lag) = s;
      for (std::size_t i = 0; i + 1 + lag < taps; ++i) {
        const std::size_t j = i + lag;
        gram(i + 1, j + 1) = gram(i, j) - trg[n - 1 - i] * trg[n - 1 - j];
      }
    }
    for (std::size_t i = 0; i < taps; ++i) {
      for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
    }
    Eigen::VectorXd rhs(taps);
    for (std::size_t k = 0; k < taps; ++k) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += est[i] * trg[i - k];
      rhs(k) = s;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * ldlt.vectorD().maxCoeff()) {
      LOG(WARNING) << "SDR normal equations are singular; using ridge 1e-8";
      gram.diagonal().array() += 1e-8 * gram(0, 0);
      ldlt.compute(gram);
    }
    const Eigen::VectorXd solution = ldlt.solve(rhs);
    for (std::size_t k = 0; k < taps; ++k) coeffs[k] = solution(k);
  }

  double proj_energy = 0.0;
  double resid_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = 0.0;
    const std::size_t kmax = std::min(taps - 1, i);
    for (std::size_t k = 0; k <= kmax; ++k) p += coeffs[k] * trg[i - k];
    const double e = est[i] - p;
    proj_energy += p * p;
    resid_energy += e * e;
  }
  return ResidualRatioDb(proj_energy, resid_energy);
}

}  // namespace

double SnrDb(std::span<const double> est, std::span<const double> trg) {
  CheckSameLength(est, trg);
  const double energy = Energy(trg);
  if (energy == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "zero-energy target");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < trg.size(); ++i) {
    const double d = est[i] - trg[i];
    err += d * d;
  }
  return ResidualRatioDb(energy, err);
}

double SiSnrDb(std::span<const double> est, std::span<const double> trg) {
  return ProjectionDb(est, trg, 1);
}

double SdrDb(std::span<const double> est, std::span<const double> trg,
             std::size_t filter_len) {
  return ProjectionDb(est, trg, filter_len);
}

double AngularErrorDeg(const Vec3& u, const Vec3& v) {
  const double nu = Norm(u);
  const double nv = Norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "angular error of a zero vector");
  }
  const double c = std::clamp(Dot(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

double EwrmsaeDeg(std::span<const Vec3> est, std::span<const Vec3> trg,
                  std::span<const double> trg_env) {
  if (est.size() != trg.size() || est.size() != trg_env.size()) {
    throw Error(ErrorCode::kShapeMismatch, "trajectory/envelope lengths differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < est.size(); ++n) {
    const double w = trg_env[n] * trg_env[n];
    if (w == 0.0) continue;
    const double ae = AngularErrorDeg(est[n], trg[n]);
    num += w * ae * ae;
    den += w;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "all-zero target envelope");
  }
  return std::sqrt(num / den);
}

Assignment UpitAssign(std::span<const double> cost, std::size_t size) {
  if (size == 0 || cost.size() != size * size) {
    throw Error(ErrorCode::kShapeMismatch, "cost matrix must be square and nonempty");
  }
  if (size > kMaxAssignmentSize) {
    throw Error(ErrorCode::kInvalidArgument, "assignment limited to 8 x 8");
  }
  std::vector<int> perm(size);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best{perm, INFINITY};
  // next_permutation visits permutations in lexicographic order, so keeping
  // only strict improvements yields the smallest optimal permutation.
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < size; ++r) total += cost[r * size + perm[r]];
    if (total < best.cost) best = {perm, total};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Assignment UpitAssign(const std::vector<std::vector<double>>& cost) {
  std::vector<double> flat;
  flat.reserve(cost.size() * cost.size());
  for (const auto& row : cost) {
    if (row.size() != cost.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "cost matrix is not square (" + std::to_string(cost.size()) +
                      " rows, a row of " + std::to_string(row.size()) + ")");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return UpitAssign(flat, cost.size());
}

}  // namespace trajsep
