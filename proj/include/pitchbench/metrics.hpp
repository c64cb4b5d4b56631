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

// Pitch-tracking error metrics between an estimated and a reference contour.
//
//   VDE  fraction of frames whose voiced flags differ
//   GPE  fraction of both-voiced frames with |cents error| >= gross threshold
//   FPE  population standard deviation (cents) over both-voiced, non-gross
//   FFE  (voicing errors + gross errors) / frames
//
// Reports carry count and moment statistics so that per-file reports pool
// into exactly the report of the concatenated frames.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"

namespace pitchbench {

inline constexpr double kSemitoneCents = 100.0;

inline double cents_error(double f_est, double f_ref) {
  if (!(f_est > 0.0) || !(f_ref > 0.0)) {
    throw DomainError(fmt::format("cents_error: frequencies must be positive ({}, {})",
                                  f_est, f_ref));
  }
  return 1200.0 * std::log2(f_est / f_ref);
}

// Cents equivalent of a relative threshold, e.g. 0.2 for the 20% criterion
// common in speech work.
inline double cents_for_relative_threshold(double relative) {
  return 1200.0 * std::log2(1.0 + relative);
}

struct ErrorReport {
  std::optional<double> gpe;  // undefined when no frame is voiced in both
  std::optional<double> fpe;  // undefined when no non-gross both-voiced frame
  double vde = 0.0;
  double ffe = 0.0;
  std::size_t n_frames = 0;
  std::size_t n_both_voiced = 0;
  std::size_t n_gross = 0;
  std::size_t n_voicing_errors = 0;
  // Fine-error moments: count, mean and sum of squared deviations (cents).
  std::size_t n_fine = 0;
  double fine_mean = 0.0;
  double fine_m2 = 0.0;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

namespace detail {

inline void finalize(ErrorReport& r) {
  r.vde = r.n_frames ? static_cast<double>(r.n_voicing_errors) / r.n_frames : 0.0;
  r.ffe = r.n_frames ? static_cast<double>(r.n_voicing_errors + r.n_gross) / r.n_frames
                     : 0.0;
  r.gpe.reset();
  r.fpe.reset();
  if (r.n_both_voiced > 0) {
    r.gpe = static_cast<double>(r.n_gross) / r.n_both_voiced;
  }
  if (r.n_fine > 0) {
    r.fpe = std::sqrt(std::max(r.fine_m2, 0.0) / static_cast<double>(r.n_fine));
  }
}

inline void require_same_hop(const PitchContour& a, const PitchContour& b) {
  if (std::abs(a.hop - b.hop) > 1e-9 * std::max(a.hop, b.hop)) {
    throw AlignmentError(fmt::format("contour hops differ: {} s vs {} s", a.hop, b.hop));
  }
}

}  // namespace detail

struct CompareOptions {
  double gross_threshold_cents = kSemitoneCents;
};

inline ErrorReport compare(const PitchContour& est, const PitchContour& ref,
                           const CompareOptions& options = {}) {
  detail::require_same_hop(est, ref);
  const std::size_t n = std::min(est.size(), ref.size());
  if (est.size() != ref.size()) {
    warn(fmt::format("compare: contour lengths differ ({} vs {}), truncating to {}",
                     est.size(), ref.size(), n));
  }
  ErrorReport r;
  r.n_frames = n;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = est.frames[k];
    const auto& f = ref.frames[k];
    if (e.voiced != f.voiced) {
      ++r.n_voicing_errors;
      continue;
    }
    if (!e.voiced) continue;
    ++r.n_both_voiced;
    const double c = cents_error(e.f0, f.f0);
    if (std::abs(c) >= options.gross_threshold_cents) {
      ++r.n_gross;
      continue;
    }
    // Welford update.
    ++r.n_fine;
    const double delta = c - r.fine_mean;
    r.fine_mean += delta / static_cast<double>(r.n_fine);
    r.fine_m2 += delta * (c - r.fine_mean);
  }
  detail::finalize(r);
  return r;
}

inline ErrorReport compare(const PitchContour& est, const PitchContour& ref,
                           double gross_threshold_cents) {
  return compare(est, ref, CompareOptions{gross_threshold_cents});
}

// Frame-weighted pooling: counts add, proportions are recomputed from the
// pooled counts and FPE from the merged moments.
inline ErrorReport pool(std::span<const ErrorReport> reports) {
  if (reports.empty()) throw DomainError("pool: no reports");
  ErrorReport out = reports.front();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& b = reports[i];
    out.n_frames += b.n_frames;
    out.n_both_voiced += b.n_both_voiced;
    out.n_gross += b.n_gross;
    out.n_voicing_errors += b.n_voicing_errors;
    if (b.n_fine == 0) continue;
    if (out.n_fine == 0) {
      out.n_fine = b.n_fine;
      out.fine_mean = b.fine_mean;
      out.fine_m2 = b.fine_m2;
      continue;
    }
    const double na = static_cast<double>(out.n_fine);
    const double nb = static_cast<double>(b.n_fine);
    const double delta = b.fine_mean - out.fine_mean;
    const double n = na + nb;
    out.fine_mean += delta * nb / n;
    out.fine_m2 += b.fine_m2 + delta * delta * na * nb / n;
    out.n_fine += b.n_fine;
  }
  detail::finalize(out);
  return out;
}

// Per-file averaging: each proportion (and FPE) is the mean of the per-file
// values where defined. Counts are summed as in pool().
inline ErrorReport pool_file_average(std::span<const ErrorReport> reports) {
  ErrorReport out = pool(reports);
  double vde = 0.0, ffe = 0.0, gpe = 0.0, fpe = 0.0;
  std::size_t n_gpe = 0, n_fpe = 0;
  for (const auto& r : reports) {
    vde += r.vde;
    ffe += r.ffe;
    if (r.gpe) {
      gpe += *r.gpe;
      ++n_gpe;
    }
    if (r.fpe) {
      fpe += *r.fpe;
      ++n_fpe;
    }
  }
  const auto n = static_cast<double>(reports.size());
  out.vde = vde / n;
  out.ffe = ffe / n;
  out.gpe = n_gpe ? std::optional<double>(gpe / n_gpe) : std::nullopt;
  out.fpe = n_fpe ? std::optional<double>(fpe / n_fpe) : std::nullopt;
  return out;
}

// V/UV substitution: voiced flags come from the donor. Where the donor is
// voiced and the target is not, F0 is copied from the nearest voiced target
// frame (ties go left) and the frame is marked as filled. If the target has
// no voiced frame at all those frames stay unvoiced.
struct Substitution {
  PitchContour contour;
  std::vector<bool> filled;
};

inline Substitution substitute_vuv(const PitchContour& target,
                                   const PitchContour& donor) {
  detail::require_same_hop(target, donor);
  if (target.size() != donor.size()) {
    throw AlignmentError(fmt::format("substitute_vuv: lengths differ ({} vs {})",
                                     target.size(), donor.size()));
  }
  const std::size_t n = target.size();
  // Nearest voiced target frame to the left and right of every index.
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> left(n, kNone), right(n, kNone);
  for (std::size_t k = 0, last = kNone; k < n; ++k) {
    if (target.frames[k].voiced) last = k;
    left[k] = last;
  }
  for (std::size_t k = n, next = kNone; k-- > 0;) {
    if (target.frames[k].voiced) next = k;
    right[k] = next;
  }

  Substitution out;
  out.contour.hop = target.hop;
  out.contour.frames.resize(n);
  out.filled.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (!donor.frames[k].voiced) continue;
    if (target.frames[k].voiced) {
      out.contour.frames[k] = target.frames[k];
      continue;
    }
    const std::size_t l = left[k], r = right[k];
    std::size_t src = kNone;
    if (l != kNone && r != kNone) {
      src = (k - l <= r - k) ? l : r;
    } else {
      src = l != kNone ? l : r;
    }
    if (src == kNone) continue;
    out.contour.frames[k] = PitchFrame::voiced_at(target.frames[src].f0, 0.0);
    out.filled[k] = true;
  }
  return out;
}

// --- serialization ---------------------------------------------------------

inline std::string error_report_csv_header() {
  return "gpe,fpe,vde,ffe,n_frames,n_both_voiced,n_gross,n_voicing_errors";
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("NA");
}

inline std::string to_csv_row(const ErrorReport& r) {
  return fmt::format("{},{},{:.6f},{:.6f},{},{},{},{}", format_optional(r.gpe),
                     format_optional(r.fpe), r.vde, r.ffe, r.n_frames,
                     r.n_both_voiced, r.n_gross, r.n_voicing_errors);
}

inline nlohmann::ordered_json to_json(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["gpe"] = r.gpe ? nlohmann::ordered_json(*r.gpe) : nlohmann::ordered_json(nullptr);
  j["fpe"] = r.fpe ? nlohmann::ordered_json(*r.fpe) : nlohmann::ordered_json(nullptr);
  j["vde"] = r.vde;
  j["ffe"] = r.ffe;
  j["n_frames"] = r.n_frames;
  j["n_both_voiced"] = r.n_both_voiced;
  j["n_gross"] = r.n_gross;
  j["n_voicing_errors"] = r.n_voicing_errors;
  j["n_fine"] = r.n_fine;
  j["fine_mean"] = r.fine_mean;
  j["fine_m2"] = r.fine_m2;
  return j;
}

inline ErrorReport error_report_from_json(const nlohmann::ordered_json& j) {
  ErrorReport r;
  r.n_frames = j.at("n_frames").get<std::size_t>();
  r.n_both_voiced = j.at("n_both_voiced").get<std::size_t>();
  r.n_gross = j.at("n_gross").get<std::size_t>();
  r.n_voicing_errors = j.at("n_voicing_errors").get<std::size_t>();
  r.n_fine = j.value("n_fine", std::size_t{0});
  r.fine_mean = j.value("fine_mean", 0.0);
  r.fine_m2 = j.value("fine_m2", 0.0);
  detail::finalize(r);
  return r;
}

}  // namespace pitchbench
