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

// Reference contours from electroglottography.
//
// The correlation tracker runs on both the EGG and its first difference
// (dEGG). Their frame-wise disagreement is reported so that a person can
// pick the better contour or exclude the recording; nothing is chosen
// automatically.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/metrics.hpp"
#include "pitchbench/signal.hpp"
#include "pitchbench/trackers.hpp"

namespace pitchbench {

// y[0] = 0, y[n] = x[n] - x[n-1].
inline Signal differentiate(const Signal& signal) {
  Signal out{std::vector<double>(signal.size(), 0.0), signal.sample_rate};
  for (std::size_t n = 1; n < signal.size(); ++n) {
    out.samples[n] = signal.samples[n] - signal.samples[n - 1];
  }
  return out;
}

struct ReferencePair {
  PitchContour egg_contour;
  PitchContour degg_contour;
  double disagreement = 0.0;
  // Frames where the two contours disagree.
  std::vector<bool> disagreeing;
};

// Correlation tracker settings used for EGG. The short window keeps
// voicing boundaries sharp; EGG is clean enough not to need a long one.
inline TrackerConfig reference_config() {
  TrackerConfig cfg = default_config(TrackerId::kNccf);
  cfg.window_length = 0.02;
  return cfg;
}

inline std::vector<bool> disagreement_mask(const PitchContour& a, const PitchContour& b,
                                           double gross_cents = 100.0) {
  if (a.size() != b.size() || std::abs(a.hop - b.hop) > 1e-12) {
    throw AlignmentError("disagreement: contours are not aligned");
  }
  std::vector<bool> mask(a.size(), false);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a.frames[k];
    const auto& y = b.frames[k];
    if (x.voiced != y.voiced) {
      mask[k] = true;
    } else if (x.voiced && std::abs(cents_error(x.f0, y.f0)) >= gross_cents) {
      mask[k] = true;
    }
  }
  return mask;
}

inline ReferencePair extract_reference(const Signal& egg,
                                       const TrackerConfig& config = reference_config()) {
  if (egg.empty()) throw DomainError("extract_reference: empty EGG signal");
  ReferencePair pair;
  pair.egg_contour = track_nccf(egg, config);
  pair.degg_contour = track_nccf(differentiate(egg), config);
  pair.disagreeing = disagreement_mask(pair.egg_contour, pair.degg_contour);
  std::size_t n = 0;
  for (bool b : pair.disagreeing) n += b ? 1 : 0;
  pair.disagreement = pair.disagreeing.empty()
                          ? 0.0
                          : static_cast<double>(n) / static_cast<double>(pair.disagreeing.size());
  return pair;
}

inline bool flag_for_exclusion(const ReferencePair& pair, double max_disagreement = 0.05) {
  return pair.disagreement > max_disagreement;
}

// One path per line.
inline void write_exclusions(const std::filesystem::path& path,
                             const std::vector<std::string>& flagged) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  for (const auto& p : flagged) out << p << '\n';
}

}  // namespace pitchbench
