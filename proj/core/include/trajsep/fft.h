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

#ifndef TRAJSEP_FFT_H_
#define TRAJSEP_FFT_H_

#include <complex>
#include <cstddef>
#include <span>

namespace trajsep {

// Real-to-complex FFT of a fixed size backed by FFTW. An instance owns its
// plans and buffers and must not be shared between threads; separate
// instances may run concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t num_bins() const { return size_ / 2 + 1; }

  // |input| may be shorter than size(); it is zero-padded.
  void Forward(std::span<const double> input,
               std::span<std::complex<double>> spectrum);

  // Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> spectrum,
               std::span<double> output);

 private:
  std::size_t size_;
  double* real_buf_;
  void* complex_buf_;
  void* forward_plan_;
  void* inverse_plan_;
};

// Smallest power of two >= n.
std::size_t NextPowerOfTwo(std::size_t n);

}  // namespace trajsep

#endif  // TRAJSEP_FFT_H_
