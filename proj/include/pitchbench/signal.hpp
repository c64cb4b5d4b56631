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

// Audio container, frame grid and analysis windows.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pitchbench/error.hpp"

namespace pitchbench {

// Mono sample sequence. Samples are nominally in [-1, 1].
struct Signal {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Throws DomainError if the rate is not positive or a sample is not finite.
inline void validate(const Signal& signal) {
  if (signal.sample_rate <= 0) {
    throw DomainError("signal sample rate must be positive, got " +
                      std::to_string(signal.sample_rate));
  }
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    if (!std::isfinite(signal.samples[i])) {
      throw DomainError("non-finite sample at index " + std::to_string(i));
    }
  }
}

inline Signal make_signal(std::vector<double> samples, int sample_rate) {
  Signal s{std::move(samples), sample_rate};
  validate(s);
  return s;
}

// Number of frames on a hop grid starting at t = 0 that covers a signal of
// n_samples: floor(duration / hop) + 1.
inline std::size_t frame_count(std::size_t n_samples, int sample_rate,
                               double hop) {
  if (hop <= 0.0) throw DomainError("hop must be positive");
  const double duration = static_cast<double>(n_samples) / sample_rate;
  return static_cast<std::size_t>(std::floor(duration / hop + 1e-9)) + 1;
}

struct FrameGrid {
  double hop = 0.010;
  double window_length = 0.030;
  std::size_t n_frames = 0;
  double origin = 0.0;

  double center_time(std::size_t k) const {
    return origin + static_cast<double>(k) * hop;
  }

  static FrameGrid for_signal(const Signal& signal, double hop,
                              double window_length) {
    return FrameGrid{hop, window_length,
                     frame_count(signal.size(), signal.sample_rate, hop), 0.0};
  }
};

// Sample index nearest to time t.
inline std::int64_t time_to_sample(double t, int sample_rate) {
  return static_cast<std::int64_t>(std::llround(t * sample_rate));
}

// Window length in samples: round(seconds * rate), bumped to odd so the
// frame has a defined center sample.
inline std::size_t odd_window_samples(double seconds, int sample_rate) {
  auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  if (n < 1) n = 1;
  if (n % 2 == 0) ++n;
  return n;
}

// Copies samples [start, start + length) with zeros outside the signal.
inline std::vector<double> extract_segment(std::span<const double> samples,
                                           std::int64_t start,
                                           std::size_t length) {
  std::vector<double> out(length, 0.0);
  const auto n = static_cast<std::int64_t>(samples.size());
  const std::int64_t lo = std::max<std::int64_t>(start, 0);
  const std::int64_t hi =
      std::min<std::int64_t>(start + static_cast<std::int64_t>(length), n);
  for (std::int64_t i = lo; i < hi; ++i) {
    out[static_cast<std::size_t>(i - start)] =
        samples[static_cast<std::size_t>(i)];
  }
  return out;
}

// Segment of odd length centered on sample `center`.
inline std::vector<double> extract_centered(std::span<const double> samples,
                                            std::int64_t center,
                                            std::size_t length) {
  const auto half = static_cast<std::int64_t>(length / 2);
  return extract_segment(samples, center - half, length);
}

inline std::vector<double> frame_signal(const Signal& signal,
                                        const FrameGrid& grid,
                                        std::size_t frame_index) {
  if (frame_index >= grid.n_frames) {
    throw BoundsError("frame index " + std::to_string(frame_index) +
                      " out of range (n_frames = " +
                      std::to_string(grid.n_frames) + ")");
  }
  const std::size_t length =
      odd_window_samples(grid.window_length, signal.sample_rate);
  const std::int64_t center =
      time_to_sample(grid.center_time(frame_index), signal.sample_rate);
  return extract_centered(signal.samples, center, length);
}

enum class WindowType { kRectangular, kHann, kBlackman };

// Symmetric windows.
inline std::vector<double> make_window(WindowType type, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2 || type == WindowType::kRectangular) return w;
  const double denom = static_cast<double>(n - 1);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = kTwoPi * static_cast<double>(i) / denom;
    switch (type) {
      case WindowType::kHann:
        w[i] = 0.5 - 0.5 * std::cos(x);
        break;
      case WindowType::kBlackman:
        w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
        break;
      case WindowType::kRectangular:
        break;
    }
  }
  if (type == WindowType::kBlackman) {
    // The closed form goes a few ulps negative at the end points.
    w.front() = w.back() = 0.0;
  }
  return w;
}

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double peak_abs(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace pitchbench
