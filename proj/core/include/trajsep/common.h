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

#ifndef TRAJSEP_COMMON_H_
#define TRAJSEP_COMMON_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trajsep {

// Speed of sound used by every propagation model in the library (m/s).
inline constexpr double kSpeedOfSound = 343.0;

// Decibel values in reports are clamped to [-kDbCap, kDbCap].
inline constexpr double kDbCap = 100.0;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kValidation,
  kInfeasible,
  kUnsupported,
  kMalformed,
  kIo,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

// Library error. Every failure raised by trajsep carries a code so the CLI can
// print a single machine-parsable line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  double operator[](int axis) const {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double Dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 Cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double SquaredNorm(const Vec3& v) { return Dot(v, v); }

inline double Norm(const Vec3& v) { return std::sqrt(SquaredNorm(v)); }

// Returns v / |v|. Throws kInvalidArgument for a zero vector.
Vec3 Normalized(const Vec3& v);

// Deterministic sub-seed derivation (SplitMix64 finalizer over seed ^ stream).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Clamps a decibel value into the report range; NaN is rejected.
double CapDb(double db);

// 10*log10(ratio), with ratio 0 and +inf mapped onto the caps.
double RatioToCappedDb(double ratio);

}  // namespace trajsep

#endif  // TRAJSEP_COMMON_H_
