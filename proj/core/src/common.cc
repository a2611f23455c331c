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

#include "trajsep/common.h"

#include <algorithm>
#include <limits>

#include "trajsep/signal.h"

namespace trajsep {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kShapeMismatch:
      return "shape_mismatch";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kInfeasible:
      return "infeasible";
    case ErrorCode::kUnsupported:
      return "unsupported";
    case ErrorCode::kMalformed:
      return "malformed";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kNotFound:
      return "not_found";
  }
  return "unknown";
}

Vec3 Normalized(const Vec3& v) {
  const double n = Norm(v);
  if (!(n > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero vector");
  }
  return v * (1.0 / n);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CapDb(double db) {
  if (std::isnan(db)) {
    throw Error(ErrorCode::kInvalidArgument, "decibel value is NaN");
  }
  return std::clamp(db, -kDbCap, kDbCap);
}

double RatioToCappedDb(double ratio) {
  if (std::isnan(ratio) || ratio < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "power ratio must be >= 0");
  }
  if (ratio == 0.0) return -kDbCap;
  if (std::isinf(ratio)) return kDbCap;
  return CapDb(10.0 * std::log10(ratio));
}

MonoSignal FoaSignal::Channel(int ch) const {
  MonoSignal out(num_frames_);
  for (std::size_t n = 0; n < num_frames_; ++n) out[n] = at(n, ch);
  return out;
}

void FoaSignal::SetChannel(int ch, std::span<const double> values) {
  if (values.size() != num_frames_) {
    throw Error(ErrorCode::kShapeMismatch, "channel length mismatch");
  }
  for (std::size_t n = 0; n < num_frames_; ++n) at(n, ch) = values[n];
}

FoaSignal& FoaSignal::operator+=(const FoaSignal& other) {
  if (other.num_frames_ != num_frames_) {
    throw Error(ErrorCode::kShapeMismatch, "FOA signal length mismatch");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    samples_[i] += other.samples_[i];
  }
  return *this;
}

FoaSignal& FoaSignal::operator*=(double gain) {
  for (double& s : samples_) s *= gain;
  return *this;
}

void CheckUnitRows(std::span<const Vec3> rows, double tol) {
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (std::abs(Norm(rows[n]) - 1.0) > tol) {
      throw Error(ErrorCode::kValidation,
                  "row " + std::to_string(n) + " is not unit norm");
    }
  }
}

void CheckFinite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kValidation,
                  "non-finite sample at index " + std::to_string(i));
    }
  }
}

void CheckFinite(const FoaSignal& signal) { CheckFinite(signal.interleaved()); }

double PeakAbs(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace trajsep
