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

// Pitch contours and the shared contour CSV format
//   time_s,f0_hz,voiced,score
// Unvoiced rows carry f0_hz 0. Lines starting with '#' are comments.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/error.hpp"

namespace pitchbench {

struct PitchFrame {
  bool voiced = false;
  double f0 = 0.0;     // Hz; meaningful only when voiced
  double score = 0.0;  // periodicity or confidence; 0 when unvoiced

  static PitchFrame unvoiced() { return {}; }
  static PitchFrame voiced_at(double f0, double score = 1.0) {
    return {true, f0, score};
  }
  friend bool operator==(const PitchFrame&, const PitchFrame&) = default;
};

struct PitchContour {
  double hop = 0.010;
  std::vector<PitchFrame> frames;

  std::size_t size() const { return frames.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * hop; }
  std::size_t voiced_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.voiced ? 1 : 0;
    return n;
  }
  friend bool operator==(const PitchContour&, const PitchContour&) = default;
};

// Builds a contour from parallel voiced flags and F0 values; frames with
// voiced == 0 ignore their F0 entry.
inline PitchContour make_contour(const std::vector<int>& voiced,
                                 const std::vector<double>& f0,
                                 double hop = 0.010) {
  if (voiced.size() != f0.size()) {
    throw DomainError("make_contour: voiced and f0 lengths differ");
  }
  PitchContour c;
  c.hop = hop;
  c.frames.reserve(voiced.size());
  for (std::size_t i = 0; i < voiced.size(); ++i) {
    c.frames.push_back(voiced[i] ? PitchFrame::voiced_at(f0[i], 1.0)
                                 : PitchFrame::unvoiced());
  }
  return c;
}

// Checks the contour invariants: positive hop, finite positive F0 inside
// [f0_min, f0_max] on voiced frames, zero F0 and score on unvoiced frames.
inline void validate(const PitchContour& c, double f0_min = 0.0,
                     double f0_max = INFINITY) {
  if (!(c.hop > 0.0)) throw DomainError("contour hop must be positive");
  for (std::size_t k = 0; k < c.frames.size(); ++k) {
    const auto& f = c.frames[k];
    if (f.voiced) {
      if (!std::isfinite(f.f0) || f.f0 <= 0.0 || f.f0 < f0_min ||
          f.f0 > f0_max) {
        throw DomainError(fmt::format("frame {}: voiced F0 {} outside [{}, {}]",
                                      k, f.f0, f0_min, f0_max));
      }
    } else if (f.f0 != 0.0 || f.score != 0.0) {
      throw DomainError(fmt::format("frame {}: unvoiced frame carries data", k));
    }
  }
}

inline std::string contour_to_csv(const PitchContour& c) {
  std::string out = "time_s,f0_hz,voiced,score\n";
  for (std::size_t k = 0; k < c.frames.size(); ++k) {
    const auto& f = c.frames[k];
    out += fmt::format("{:.6f},{:.6f},{},{:.6f}\n", c.time(k),
                       f.voiced ? f.f0 : 0.0, f.voiced ? 1 : 0,
                       f.voiced ? f.score : 0.0);
  }
  return out;
}

inline void write_contour_csv(const std::filesystem::path& path,
                              const PitchContour& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contour_to_csv(c);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + s + "'");
  }
}

}  // namespace detail

// Parses the contour CSV. The hop is inferred from the time column; a
// single-row file gets `fallback_hop`.
inline PitchContour parse_contour_csv(std::istream& in, const std::string& name,
                                      double fallback_hop = 0.010) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<double> times;
  PitchContour c;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = fmt::format("{}:{}", name, line_no);
    if (!header_seen) {
      if (line.rfind("time_s,f0_hz,voiced", 0) != 0) {
        throw ParseError(where + ": missing header 'time_s,f0_hz,voiced,score'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(fmt::format("{}: expected 4 fields, got {}", where,
                                   fields.size()));
    }
    const double t = detail::parse_double(fields[0], where);
    const double f0 = detail::parse_double(fields[1], where);
    const double voiced_flag = detail::parse_double(fields[2], where);
    const double score =
        fields.size() == 4 ? detail::parse_double(fields[3], where) : 0.0;
    if (voiced_flag != 0.0 && voiced_flag != 1.0) {
      throw ParseError(where + ": voiced must be 0 or 1");
    }
    if (f0 < 0.0 || !std::isfinite(f0)) {
      throw ParseError(where + ": negative or non-finite f0");
    }
    times.push_back(t);
    const bool voiced = voiced_flag == 1.0 && f0 > 0.0;
    c.frames.push_back(voiced ? PitchFrame::voiced_at(f0, score)
                              : PitchFrame::unvoiced());
  }
  if (!header_seen) throw ParseError(name + ": empty contour file");
  if (times.size() >= 2) {
    c.hop = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(c.hop > 0.0)) throw ParseError(name + ": time column not increasing");
  } else {
    c.hop = fallback_hop;
  }
  return c;
}

inline PitchContour read_contour_csv(const std::filesystem::path& path,
                                     double fallback_hop = 0.010) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_contour_csv(in, path.string(), fallback_hop);
}

// Brings a contour to a coarser hop by keeping every N-th frame, where
// N = target / source must be an integer.
inline PitchContour decimate_contour(const PitchContour& c, double target_hop) {
  const double ratio = target_hop / c.hop;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-6 * ratio) {
    throw FormatError(fmt::format(
        "source hop {} s does not divide target hop {} s", c.hop, target_hop));
  }
  const auto step = static_cast<std::size_t>(n);
  PitchContour out;
  out.hop = target_hop;
  for (std::size_t k = 0; k < c.frames.size(); k += step) {
    out.frames.push_back(c.frames[k]);
  }
  return out;
}

// Loads a contour computed by an external tool (e.g. at a 1 ms hop) and
// resamples it to the analysis hop by integer decimation.
inline PitchContour import_external_contour(const std::filesystem::path& path,
                                            double hop = 0.010) {
  return decimate_contour(read_contour_csv(path, hop), hop);
}

}  // namespace pitchbench
