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

// Contour post-processing that repairs octave jumps and short spikes.
//
// Three passes run over voiced runs only, in log-frequency:
//   1. spike repair: short pieces bounded by large jumps are octave-shifted
//      towards the surrounding contour, or bridged by interpolation;
//   2. register snap: runs sitting an octave away from the global median
//      are shifted back by whole octaves;
//   3. gated median: frames far from their local median take that median.
// The passes repeat until nothing changes. Voicing flags are never touched.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"

namespace pitchbench {

struct PostFilterConfig {
  double jump_threshold = 600.0;     // cents
  double max_spike_duration = 0.1;   // seconds
  int median_window = 5;             // frames, odd
  bool octave_snap = true;
  double median_gate = 100.0;        // cents
  double register_threshold = 1150.0;  // cents
  int max_iterations = 8;
};

inline void validate(const PostFilterConfig& c) {
  if (!(c.jump_threshold > 0.0)) throw DomainError("postfilter: jump_threshold must be positive");
  if (!(c.max_spike_duration >= 0.0)) {
    throw DomainError("postfilter: max_spike_duration must be non-negative");
  }
  if (c.median_window < 1 || c.median_window % 2 == 0) {
    throw DomainError("postfilter: median_window must be odd and >= 1");
  }
  if (!(c.median_gate >= 0.0)) throw DomainError("postfilter: median_gate must be non-negative");
  if (c.max_iterations < 1) throw DomainError("postfilter: max_iterations must be >= 1");
}

namespace detail {

struct Run {
  std::size_t begin;
  std::size_t end;  // exclusive
};

inline std::vector<Run> voiced_runs(const PitchContour& c) {
  std::vector<Run> runs;
  std::size_t k = 0;
  while (k < c.size()) {
    if (!c.frames[k].voiced) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < c.size() && c.frames[e].voiced) ++e;
    runs.push_back({k, e});
    k = e;
  }
  return runs;
}

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// All helpers below operate on log2(F0) in octaves.

inline bool spike_repair(std::vector<double>& lf, const Run& run, const PostFilterConfig& cfg,
                         double hop) {
  const double jump = cfg.jump_threshold / 1200.0;
  const auto max_len =
      static_cast<std::size_t>(std::floor(cfg.max_spike_duration / hop + 1e-9));
  // Pieces separated by jumps of at least `jump`.
  std::vector<std::size_t> cuts{run.begin};
  for (std::size_t k = run.begin + 1; k < run.end; ++k) {
    if (std::abs(lf[k] - lf[k - 1]) >= jump) cuts.push_back(k);
  }
  cuts.push_back(run.end);
  bool changed = false;
  for (std::size_t p = 1; p + 2 < cuts.size(); ++p) {
    const std::size_t b = cuts[p], e = cuts[p + 1];
    if (e - b > max_len) continue;
    const double left = lf[b - 1], right = lf[e];
    // The piece must stand apart from both neighbours.
    if (std::abs(lf[b] - left) < jump || std::abs(lf[e - 1] - right) < jump) continue;
    std::vector<double> context;
    for (std::size_t k = b; k > run.begin && b - k < 3; --k) context.push_back(lf[k - 1]);
    for (std::size_t k = e; k < run.end && k - e < 3; ++k) context.push_back(lf[k]);
    const double target = median_of(context);
    bool fixed = false;
    if (cfg.octave_snap) {
      std::vector<double> piece(lf.begin() + static_cast<std::ptrdiff_t>(b),
                                lf.begin() + static_cast<std::ptrdiff_t>(e));
      const double shift = std::round(target - median_of(piece));
      if (shift != 0.0 && std::abs(lf[b] + shift - left) < jump &&
          std::abs(lf[e - 1] + shift - right) < jump) {
        for (std::size_t k = b; k < e; ++k) lf[k] += shift;
        fixed = true;
      }
    }
    if (!fixed) {
      const double span = static_cast<double>(e - b + 1);
      for (std::size_t k = b; k < e; ++k) {
        lf[k] = left + (right - left) * static_cast<double>(k - b + 1) / span;
      }
    }
    changed = true;
  }
  return changed;
}

inline bool register_snap(std::vector<double>& lf, const std::vector<Run>& runs,
                          double global_median, double threshold_octaves) {
  bool changed = false;
  for (const auto& run : runs) {
    std::vector<double> v(lf.begin() + static_cast<std::ptrdiff_t>(run.begin),
                          lf.begin() + static_cast<std::ptrdiff_t>(run.end));
    const double offset = median_of(std::move(v)) - global_median;
    if (std::abs(offset) < threshold_octaves) continue;
    const double shift = -std::round(offset);
    if (shift == 0.0) continue;
    for (std::size_t k = run.begin; k < run.end; ++k) lf[k] += shift;
    changed = true;
  }
  return changed;
}

inline bool gated_median(std::vector<double>& lf, const Run& run, int window, double gate) {
  if (window <= 1) return false;
  const auto half = static_cast<std::size_t>(window / 2);
  const std::vector<double> in(lf.begin() + static_cast<std::ptrdiff_t>(run.begin),
                               lf.begin() + static_cast<std::ptrdiff_t>(run.end));
  const std::size_t n = in.size();
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    std::vector<double> w(in.begin() + static_cast<std::ptrdiff_t>(lo),
                          in.begin() + static_cast<std::ptrdiff_t>(hi));
    // Even-sized windows at the run edges pick the member closest to the
    // centre so the output is always an existing value.
    std::sort(w.begin(), w.end());
    double med = w[w.size() / 2];
    if (w.size() % 2 == 0) {
      const double a = w[w.size() / 2 - 1], b = w[w.size() / 2];
      med = std::abs(a - in[i]) <= std::abs(b - in[i]) ? a : b;
    }
    if (std::abs(in[i] - med) > gate) {
      lf[run.begin + i] = med;
      changed = true;
    }
  }
  return changed;
}

}  // namespace detail

inline PitchContour postprocess(const PitchContour& contour, const PostFilterConfig& config = {}) {
  validate(config);
  PitchContour out = contour;
  const auto runs = detail::voiced_runs(contour);
  if (runs.empty()) return out;

  std::vector<double> lf(contour.size(), 0.0);
  std::vector<double> all;
  for (const auto& run : runs) {
    for (std::size_t k = run.begin; k < run.end; ++k) {
      if (!(contour.frames[k].f0 > 0.0)) {
        throw DomainError("postprocess: voiced frame with non-positive F0");
      }
      lf[k] = std::log2(contour.frames[k].f0);
    }
  }

  for (int it = 0; it < config.max_iterations; ++it) {
    bool changed = false;
    for (const auto& run : runs) changed |= detail::spike_repair(lf, run, config, contour.hop);
    all.clear();
    for (const auto& run : runs) {
      all.insert(all.end(), lf.begin() + static_cast<std::ptrdiff_t>(run.begin),
                 lf.begin() + static_cast<std::ptrdiff_t>(run.end));
    }
    changed |= detail::register_snap(lf, runs, detail::median_of(all),
                                     config.register_threshold / 1200.0);
    for (const auto& run : runs) {
      changed |= detail::gated_median(lf, run, config.median_window, config.median_gate / 1200.0);
    }
    if (!changed) break;
  }

  for (const auto& run : runs) {
    for (std::size_t k = run.begin; k < run.end; ++k) {
      if (lf[k] != std::log2(contour.frames[k].f0)) out.frames[k].f0 = std::exp2(lf[k]);
    }
  }
  return out;
}

}  // namespace pitchbench
