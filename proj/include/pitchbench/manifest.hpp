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

// Evaluation manifests: one CSV row per audio file with its reference.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"

namespace pitchbench {

inline constexpr std::string_view kManifestHeader =
    "audio_path,reference_path,singer_id,category,mechanism,exercise";

inline constexpr std::string_view kCategories[] = {"baritone", "countertenor", "soprano",
                                                   "other"};
inline constexpr std::string_view kMechanisms[] = {"M1", "M2", "unknown"};

struct ManifestEntry {
  std::string audio_path;
  std::string reference_path;
  std::string singer_id;
  std::string category = "other";
  std::string mechanism = "unknown";
  std::string exercise;
};

namespace detail {

template <typename Range>
bool in_vocabulary(const Range& vocab, std::string_view s) {
  return std::find(std::begin(vocab), std::end(vocab), s) != std::end(vocab);
}

}  // namespace detail

// Relative paths are resolved against `base_dir`.
inline std::vector<ManifestEntry> parse_manifest(std::istream& in, std::string_view name,
                                                 const std::filesystem::path& base_dir = {}) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (line != kManifestHeader) {
        throw ParseError(fmt::format("{}:{}: expected header '{}'", name, line_no,
                                     kManifestHeader));
      }
      have_header = true;
      continue;
    }
    auto f = detail::split_csv_line(line);
    if (f.size() != 6) {
      throw ParseError(fmt::format("{}:{}: expected 6 fields, got {}", name, line_no, f.size()));
    }
    ManifestEntry e{f[0], f[1], f[2], f[3], f[4], f[5]};
    if (e.audio_path.empty()) {
      throw ParseError(fmt::format("{}:{}: empty audio_path", name, line_no));
    }
    if (!detail::in_vocabulary(kCategories, e.category)) {
      throw ParseError(fmt::format("{}:{}: unknown category '{}'", name, line_no, e.category));
    }
    if (!detail::in_vocabulary(kMechanisms, e.mechanism)) {
      throw ParseError(fmt::format("{}:{}: unknown mechanism '{}'", name, line_no, e.mechanism));
    }
    auto resolve = [&](std::string& p) {
      if (!p.empty() && std::filesystem::path(p).is_relative() && !base_dir.empty()) {
        p = (base_dir / p).lexically_normal().string();
      }
    };
    resolve(e.audio_path);
    resolve(e.reference_path);
    entries.push_back(std::move(e));
  }
  if (!have_header) throw ParseError(fmt::format("{}: missing manifest header", name));
  return entries;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open manifest {}", path.string()));
  return parse_manifest(in, path.string(), path.parent_path());
}

inline void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries) {
  out << kManifestHeader << '\n';
  for (const auto& e : entries) {
    out << fmt::format("{},{},{},{},{},{}\n", e.audio_path, e.reference_path, e.singer_id,
                       e.category, e.mechanism, e.exercise);
  }
}

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write manifest {}", path.string()));
  write_manifest(out, entries);
}

}  // namespace pitchbench
