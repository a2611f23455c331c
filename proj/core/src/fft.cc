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

#include "trajsep/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "trajsep/common.h"

namespace trajsep {
namespace {

// The FFTW planner is not reentrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw Error(ErrorCode::kInvalidArgument, "FFT size must be >= 2");
  real_buf_ = fftw_alloc_real(size_);
  fftw_complex* cbuf = fftw_alloc_complex(num_bins());
  complex_buf_ = cbuf;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  const int n = static_cast<int>(size_);
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real_buf_, cbuf, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, cbuf, real_buf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  }
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

void RealFft::Forward(std::span<const double> input,
                      std::span<std::complex<double>> spectrum) {
  if (input.size() > size_ || spectrum.size() < num_bins()) {
    throw Error(ErrorCode::kShapeMismatch, "FFT buffer size mismatch");
  }
  std::copy(input.begin(), input.end(), real_buf_);
  std::fill(real_buf_ + input.size(), real_buf_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(spectrum.data(), complex_buf_,
              num_bins() * sizeof(std::complex<double>));
}

void RealFft::Inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> output) {
  if (spectrum.size() < num_bins() || output.size() < size_) {
    throw Error(ErrorCode::kShapeMismatch, "FFT buffer size mismatch");
  }
  // c2r destroys its input, so it always works on the internal copy.
  std::memcpy(complex_buf_, spectrum.data(),
              num_bins() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_buf_, real_buf_ + size_, output.begin());
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace trajsep
