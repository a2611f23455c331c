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

// Independent brute-force reference evaluators used by unit and acceptance
// tests. Written straight from the formulas in long double, sharing no code
// with the library beyond its plain data types.

#ifndef TRAJSEP_TESTS_SUPPORT_ORACLES_H_
#define TRAJSEP_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "trajsep/common.h"

namespace trajsep::oracle {

using Rows = std::vector<Vec3>;
using Matrix = std::vector<std::vector<double>>;

inline double CapDbRef(long double db) {
  if (std::isnan(static_cast<double>(db))) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(std::clamp<long double>(db, -100.0L, 100.0L));
}

// 10 log10(num / den), with num == 0 mapping to the lower cap.
inline double RatioDb(long double num, long double den) {
  if (num == 0.0L) return -100.0;
  if (den == 0.0L) return 100.0;
  return CapDbRef(10.0L * std::log10(num / den));
}

inline double NmseDb(const std::vector<double>& est, const std::vector<double>& trg) {
  long double err = 0.0L, energy = 0.0L;
  for (std::size_t t = 0; t < trg.size(); ++t) {
    const long double d = static_cast<long double>(est[t]) - trg[t];
    err += d * d;
    energy += static_cast<long double>(trg[t]) * trg[t];
  }
  return RatioDb(err, energy);
}

inline double NmseSetDb(const Matrix& est, const Matrix& trg) {
  long double sum = 0.0L;
  for (std::size_t c = 0; c < est.size(); ++c) sum += NmseDb(est[c], trg[c]);
  return static_cast<double>(sum / est.size());
}

inline double InactiveDb(const std::vector<double>& est, const std::vector<double>& mix,
                         double tau) {
  long double a = 0.0L, b = 0.0L;
  for (double v : est) a += static_cast<long double>(v) * v;
  for (double v : mix) b += static_cast<long double>(v) * v;
  const long double inner = a + tau * b;
  if (inner == 0.0L) return -100.0;
  return CapDbRef(10.0L * std::log10(inner));
}

// Sum over n and components of (env_n e_nk - env_n t_nk)^2 / (3N).
inline double TrajectoryLossRef(const Rows& est, const Rows& trg, const std::vector<double>& env) {
  long double sum = 0.0L;
  for (std::size_t n = 0; n < est.size(); ++n) {
    for (int k = 0; k < 3; ++k) {
      const long double a = static_cast<long double>(env[n]) * est[n][k];
      const long double b = static_cast<long double>(env[n]) * trg[n][k];
      sum += (a - b) * (a - b);
    }
  }
  return static_cast<double>(sum / (3.0L * est.size()));
}

inline double DifferentialLossRef(const Rows& est, const Rows& trg, int max_exp) {
  long double total = 0.0L;
  int scales = 0;
  for (int i = 0; i <= max_exp; ++i) {
    const std::size_t d = std::size_t{1} << i;
    long double sum = 0.0L;
    for (std::size_t n = d; n < est.size(); ++n) {
      for (int k = 0; k < 3; ++k) {
        const long double de = static_cast<long double>(est[n][k]) - est[n - d][k];
        const long double dt = static_cast<long double>(trg[n][k]) - trg[n - d][k];
        sum += (de - dt) * (de - dt);
      }
    }
    total += sum / (3.0L * (est.size() - d));
    ++scales;
  }
  return static_cast<double>(total / scales);
}

// Angle via atan2(|u x v|, u . v), a different route from acos.
inline long double AngleDegRef(const Vec3& u, const Vec3& v) {
  const long double cx = static_cast<long double>(u.y) * v.z - static_cast<long double>(u.z) * v.y;
  const long double cy = static_cast<long double>(u.z) * v.x - static_cast<long double>(u.x) * v.z;
  const long double cz = static_cast<long double>(u.x) * v.y - static_cast<long double>(u.y) * v.x;
  const long double dot = static_cast<long double>(u.x) * v.x +
                          static_cast<long double>(u.y) * v.y +
                          static_cast<long double>(u.z) * v.z;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) * 180.0L /
         3.141592653589793238462643383279502884L;
}

inline double EwrmsaeRef(const Rows& est, const Rows& trg, const std::vector<double>& env) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t n = 0; n < est.size(); ++n) {
    const long double w = static_cast<long double>(env[n]) * env[n];
    if (w == 0.0L) continue;
    const long double a = AngleDegRef(est[n], trg[n]);
    num += w * a * a;
    den += w;
  }
  return static_cast<double>(std::sqrt(num / den));
}

inline double RmsAngleRef(const Rows& est, const Rows& trg) {
  long double s = 0.0L;
  for (std::size_t n = 0; n < est.size(); ++n) {
    const long double a = AngleDegRef(est[n], trg[n]);
    s += a * a;
  }
  return static_cast<double>(std::sqrt(s / est.size()));
}

inline double SnrRef(const std::vector<double>& est, const std::vector<double>& trg) {
  long double s = 0.0L, e = 0.0L;
  for (std::size_t n = 0; n < trg.size(); ++n) {
    s += static_cast<long double>(trg[n]) * trg[n];
    const long double d = static_cast<long double>(est[n]) - trg[n];
    e += d * d;
  }
  if (e == 0.0L) return 100.0;
  return CapDbRef(10.0L * std::log10(s / e));
}

inline double SiSnrRef(const std::vector<double>& est, const std::vector<double>& trg) {
  long double et = 0.0L, tt = 0.0L;
  for (std::size_t n = 0; n < trg.size(); ++n) {
    et += static_cast<long double>(est[n]) * trg[n];
    tt += static_cast<long double>(trg[n]) * trg[n];
  }
  const long double a = et / tt;
  long double p = 0.0L, r = 0.0L;
  for (std::size_t n = 0; n < trg.size(); ++n) {
    const long double proj = a * trg[n];
    const long double res = est[n] - proj;
    p += proj * proj;
    r += res * res;
  }
  if (r == 0.0L) return 100.0;
  if (p == 0.0L) return -100.0;
  return CapDbRef(10.0L * std::log10(p / r));
}

// Least-squares projection onto trg delayed by 0..taps-1 via dense normal
// equations and Gaussian elimination with partial pivoting.
inline double SdrRef(const std::vector<double>& est, const std::vector<double>& trg,
                     std::size_t taps) {
  const std::size_t n = trg.size();
  auto delayed = [&](std::size_t k, std::size_t i) -> long double {
    return i >= k ? trg[i - k] : 0.0L;
  };
  std::vector<std::vector<long double>> a(taps, std::vector<long double>(taps + 1, 0.0L));
  for (std::size_t r = 0; r < taps; ++r) {
    for (std::size_t c = 0; c < taps; ++c) {
      long double s = 0.0L;
      for (std::size_t i = 0; i < n; ++i) s += delayed(r, i) * delayed(c, i);
      a[r][c] = s;
    }
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += delayed(r, i) * est[i];
    a[r][taps] = s;
  }
  for (std::size_t col = 0; col < taps; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < taps; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < taps; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= taps; ++c) a[r][c] -= f * a[col][c];
    }
  }
  long double p = 0.0L, res = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double proj = 0.0L;
    for (std::size_t k = 0; k < taps; ++k) proj += a[k][taps] / a[k][k] * delayed(k, i);
    p += proj * proj;
    res += (est[i] - proj) * (est[i] - proj);
  }
  if (res == 0.0L) return 100.0;
  return CapDbRef(10.0L * std::log10(p / res));
}

struct PermResult {
  std::vector<int> perm;
  long double cost = 0.0L;
};

// Depth-first enumeration of all permutations in lexicographic order,
// keeping the first minimum encountered.
inline PermResult ExhaustiveAssign(std::size_t size,
                                   const std::function<long double(int, int)>& cost) {
  PermResult best;
  best.cost = std::numeric_limits<long double>::infinity();
  std::vector<int> perm;
  std::vector<bool> used(size, false);
  std::function<void(long double)> dfs = [&](long double acc) {
    if (perm.size() == size) {
      if (acc < best.cost) best = {perm, acc};
      return;
    }
    for (std::size_t j = 0; j < size; ++j) {
      if (used[j]) continue;
      used[j] = true;
      perm.push_back(static_cast<int>(j));
      dfs(acc + cost(static_cast<int>(perm.size() - 1), static_cast<int>(j)));
      perm.pop_back();
      used[j] = false;
    }
  };
  dfs(0.0L);
  return best;
}

inline Vec3 RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n > 1e-3) return {v.x / n, v.y / n, v.z / n};
  }
}

inline double RelDiff(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace trajsep::oracle

#endif  // TRAJSEP_TESTS_SUPPORT_ORACLES_H_
