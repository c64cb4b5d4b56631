/*
Copyright 2026 The pitchbench Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Thin FFTW wrapper. Plans are created once per size under a lock and then
// executed on caller-owned buffers, which FFTW allows from any thread.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace pitchbench::fft {

using Complex = std::complex<double>;

namespace detail {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

inline PlanPair plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::unordered_map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Scratch buffers only shape the plan; execution uses the new-array API.
  std::vector<double> real(n);
  std::vector<Complex> spec(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int size = static_cast<int>(n);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(
      size, real.data(), reinterpret_cast<fftw_complex*>(spec.data()), flags);
  p.inverse = fftw_plan_dft_c2r_1d(
      size, reinterpret_cast<fftw_complex*>(spec.data()), real.data(), flags);
  cache.emplace(n, p);
  return p;
}

}  // namespace detail

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Forward real transform of x zero-padded (or truncated) to n points.
// Returns the n/2 + 1 non-negative frequency bins.
inline std::vector<Complex> rfft(std::span<const double> x, std::size_t n) {
  std::vector<double> in(n, 0.0);
  const std::size_t m = std::min(n, x.size());
  for (std::size_t i = 0; i < m; ++i) in[i] = x[i];
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(detail::plans_for(n).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

// Inverse of rfft, normalized so irfft(rfft(x, n), n) == x.
inline std::vector<double> irfft(std::vector<Complex> spectrum, std::size_t n) {
  spectrum.resize(n / 2 + 1);
  std::vector<double> out(n);
  fftw_execute_dft_c2r(detail::plans_for(n).inverse,
                       reinterpret_cast<fftw_complex*>(spectrum.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace pitchbench::fft
