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

// Two-stage grid search over a tracker's voicing threshold and window
// length, plus an exhaustive cross-product search for validation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/metrics.hpp"
#include "pitchbench/parallel.hpp"
#include "pitchbench/signal.hpp"
#include "pitchbench/trackers.hpp"

namespace pitchbench {

struct DatasetItem {
  std::string name;
  Signal audio;
  PitchContour reference;
};

// Stage 1 minimizes pooled VDE over threshold_grid at the default window;
// stage 2 minimizes pooled FFE over window_grid at the stage-1 threshold.
struct SearchSpec {
  std::vector<double> threshold_grid;
  std::vector<double> window_grid;  // seconds
};

inline void validate(const SearchSpec& spec) {
  auto check = [](const std::vector<double>& g, const char* what) {
    if (g.empty()) throw DomainError(fmt::format("search spec: {} grid is empty", what));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i]) || g[i] <= 0.0) {
        throw DomainError(fmt::format("search spec: {} grid value {} is not positive",
                                      what, g[i]));
      }
      if (i > 0 && !(g[i] > g[i - 1])) {
        throw DomainError(fmt::format("search spec: {} grid is not strictly increasing",
                                      what));
      }
    }
  };
  check(spec.threshold_grid, "threshold");
  check(spec.window_grid, "window");
}

namespace detail {

inline std::vector<double> linear_grid(double first, double last, double step) {
  std::vector<double> g;
  const auto n = static_cast<int>(std::floor((last - first) / step + 1e-9));
  for (int i = 0; i <= n; ++i) {
    // Rounded so grid values print and compare cleanly.
    g.push_back(std::round((first + i * step) * 1e6) / 1e6);
  }
  return g;
}

}  // namespace detail

inline SearchSpec default_search_spec(TrackerId id) {
  SearchSpec s;
  if (id == TrackerId::kSrh || id == TrackerId::kSsh) {
    s.threshold_grid = detail::linear_grid(0.02, 0.60, 0.01);
  } else {
    s.threshold_grid = detail::linear_grid(0.05, 0.90, 0.05);
  }
  s.window_grid = {0.010, 0.016, 0.025, 0.050, 0.075, 0.100, 0.125, 0.150};
  return s;
}

enum class Pooling { kFrames, kFileAverage };

inline ErrorReport pool_reports(std::span<const ErrorReport> reports, Pooling pooling) {
  return pooling == Pooling::kFrames ? pool(reports) : pool_file_average(reports);
}

struct ScoreRow {
  std::string stage;  // "threshold", "window" or "exhaustive"
  double threshold = 0.0;
  double window_length = 0.0;
  ErrorReport report;

  double param_value() const { return stage == "threshold" ? threshold : window_length; }
};

struct OptimizationResult {
  TrackerConfig config;
  std::vector<ScoreRow> scores;  // stage-1 rows, then stage-2 rows
  bool threshold_stage_skipped = false;
  // Pooled scores of the default config and of the returned config.
  ErrorReport default_report;
  ErrorReport selected_report;
  // Set when the two-stage pick scored a higher FFE than the default config,
  // which is then returned unchanged.
  bool kept_default = false;
};

// Pooled score of one configuration over the whole dataset.
using Objective = std::function<ErrorReport(const TrackerConfig&)>;
// Pooled scores of several configurations; may evaluate them concurrently.
using BatchObjective =
    std::function<std::vector<ErrorReport>(const std::vector<TrackerConfig>&)>;

namespace detail {

inline BatchObjective sequential(const Objective& objective) {
  return [objective](const std::vector<TrackerConfig>& configs) {
    std::vector<ErrorReport> out;
    out.reserve(configs.size());
    for (const auto& c : configs) out.push_back(objective(c));
    return out;
  };
}

// Index of the first minimum; earlier grid entries win ties.
template <typename Key>
std::size_t argmin(const std::vector<ErrorReport>& reports, Key key) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (key(reports[i]) < key(reports[best])) best = i;
  }
  return best;
}

inline std::vector<double> with_value(std::vector<double> grid, double value) {
  const bool present = std::any_of(grid.begin(), grid.end(), [&](double g) {
    return std::abs(g - value) <= 1e-12 * std::max(1.0, std::abs(value));
  });
  if (!present) {
    grid.insert(std::lower_bound(grid.begin(), grid.end(), value), value);
  }
  return grid;
}

}  // namespace detail

// Two-stage search against an arbitrary objective. The window grid always
// includes the default window.
inline OptimizationResult optimize_two_stage(const BatchObjective& objective,
                                             bool tune_threshold, const SearchSpec& spec,
                                             const TrackerConfig& default_config) {
  validate(spec);
  OptimizationResult result;
  TrackerConfig cfg = default_config;

  if (tune_threshold) {
    std::vector<TrackerConfig> configs;
    for (double t : spec.threshold_grid) {
      TrackerConfig c = default_config;
      c.voicing_threshold = t;
      configs.push_back(c);
    }
    const auto reports = objective(configs);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      result.scores.push_back(
          {"threshold", configs[i].voicing_threshold, configs[i].window_length, reports[i]});
    }
    const auto best = detail::argmin(reports, [](const ErrorReport& r) { return r.vde; });
    cfg.voicing_threshold = configs[best].voicing_threshold;
  } else {
    result.threshold_stage_skipped = true;
  }

  const auto windows = detail::with_value(spec.window_grid, default_config.window_length);
  std::vector<TrackerConfig> configs;
  for (double w : windows) {
    TrackerConfig c = cfg;
    c.window_length = w;
    configs.push_back(c);
  }
  configs.push_back(default_config);
  auto reports = objective(configs);
  for (std::size_t i = 0; i + 1 < configs.size(); ++i) {
    result.scores.push_back(
        {"window", configs[i].voicing_threshold, configs[i].window_length, reports[i]});
  }
  result.default_report = reports.back();
  reports.pop_back();
  configs.pop_back();
  const auto best = detail::argmin(reports, [](const ErrorReport& r) { return r.ffe; });
  result.config = configs[best];
  result.selected_report = reports[best];
  if (result.default_report.ffe < result.selected_report.ffe) {
    result.config = default_config;
    result.selected_report = result.default_report;
    result.kept_default = true;
  }
  return result;
}

inline OptimizationResult optimize_two_stage(const Objective& objective, bool tune_threshold,
                                             const SearchSpec& spec,
                                             const TrackerConfig& default_config) {
  return optimize_two_stage(detail::sequential(objective), tune_threshold, spec,
                            default_config);
}

struct ExhaustiveResult {
  TrackerConfig config;
  ErrorReport report;
  std::vector<ScoreRow> scores;  // threshold-major order
};

// Minimum pooled FFE over the full cross product; ties go to the smaller
// threshold, then the shorter window.
inline ExhaustiveResult optimize_exhaustive(const BatchObjective& objective,
                                            bool tune_threshold, const SearchSpec& spec,
                                            const TrackerConfig& default_config) {
  validate(spec);
  const auto thresholds = tune_threshold ? spec.threshold_grid
                                         : std::vector<double>{default_config.voicing_threshold};
  const auto windows = detail::with_value(spec.window_grid, default_config.window_length);
  std::vector<TrackerConfig> configs;
  for (double t : thresholds) {
    for (double w : windows) {
      TrackerConfig c = default_config;
      c.voicing_threshold = t;
      c.window_length = w;
      configs.push_back(c);
    }
  }
  const auto reports = objective(configs);
  ExhaustiveResult out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out.scores.push_back(
        {"exhaustive", configs[i].voicing_threshold, configs[i].window_length, reports[i]});
  }
  const auto best = detail::argmin(reports, [](const ErrorReport& r) { return r.ffe; });
  out.config = configs[best];
  out.report = reports[best];
  return out;
}

inline ExhaustiveResult optimize_exhaustive(const Objective& objective, bool tune_threshold,
                                            const SearchSpec& spec,
                                            const TrackerConfig& default_config) {
  return optimize_exhaustive(detail::sequential(objective), tune_threshold, spec,
                             default_config);
}

struct OptimizeOptions {
  Pooling pooling = Pooling::kFrames;
  int jobs = 1;
};

// Runs `tracker` over every item for each configuration and pools the
// per-file reports. Identical configurations are evaluated once. The
// dataset must outlive the returned objective.
inline BatchObjective dataset_objective(TrackerId tracker, const std::vector<DatasetItem>& dataset,
                                        const OptimizeOptions& options = {}) {
  if (dataset.empty()) throw DomainError("optimize: dataset is empty");
  auto cache = std::make_shared<std::map<std::pair<double, double>, ErrorReport>>();
  return [tracker, &dataset, options, cache](const std::vector<TrackerConfig>& configs) {
    std::vector<TrackerConfig> todo;
    for (const auto& c : configs) {
      const auto key = std::make_pair(c.voicing_threshold, c.window_length);
      if (cache->count(key)) continue;
      const bool queued = std::any_of(todo.begin(), todo.end(), [&](const TrackerConfig& t) {
        return t.voicing_threshold == c.voicing_threshold &&
               t.window_length == c.window_length;
      });
      if (!queued) todo.push_back(c);
    }
    const std::size_t n_items = dataset.size();
    std::vector<ErrorReport> per_file(todo.size() * n_items);
    parallel_for(per_file.size(), options.jobs, [&](std::size_t task) {
      const auto& cfg = todo[task / n_items];
      const auto& item = dataset[task % n_items];
      try {
        per_file[task] = compare(track(tracker, item.audio, cfg), item.reference);
      } catch (const std::exception& e) {
        throw Error(fmt::format("{} failed on {}: {}", tracker_name(tracker), item.name,
                                e.what()));
      }
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
      const std::span<const ErrorReport> files(per_file.data() + i * n_items, n_items);
      (*cache)[{todo[i].voicing_threshold, todo[i].window_length}] =
          pool_reports(files, options.pooling);
    }
    std::vector<ErrorReport> out;
    out.reserve(configs.size());
    for (const auto& c : configs) {
      out.push_back(cache->at({c.voicing_threshold, c.window_length}));
    }
    return out;
  };
}

// Two-stage search of `tracker` on `dataset`. Trackers without a voicing
// threshold skip stage 1 with a warning.
inline OptimizationResult optimize(TrackerId tracker, const std::vector<DatasetItem>& dataset,
                                   const SearchSpec& spec, const TrackerConfig& default_config,
                                   const OptimizeOptions& options = {}) {
  validate(spec);
  const bool tune = supports_voicing_threshold(tracker);
  if (!tune) {
    warn(fmt::format("optimize: {} has no voicing threshold; skipping the threshold stage",
                     tracker_name(tracker)));
  }
  return optimize_two_stage(dataset_objective(tracker, dataset, options), tune, spec,
                            default_config);
}

inline ExhaustiveResult optimize_exhaustive(TrackerId tracker,
                                            const std::vector<DatasetItem>& dataset,
                                            const SearchSpec& spec,
                                            const TrackerConfig& default_config,
                                            const OptimizeOptions& options = {}) {
  validate(spec);
  return optimize_exhaustive(dataset_objective(tracker, dataset, options),
                             supports_voicing_threshold(tracker), spec, default_config);
}

// --- tuned configurations -------------------------------------------------

inline nlohmann::ordered_json config_to_json(TrackerId tracker, const TrackerConfig& c) {
  return {{"tracker", std::string(tracker_name(tracker))},
          {"window_length", c.window_length},
          {"voicing_threshold", c.voicing_threshold}};
}

// Reads a tuned configuration written by config_to_json; fields not stored
// there keep the tracker's optimized preset.
inline std::pair<TrackerId, TrackerConfig> config_from_json(const nlohmann::json& j) {
  try {
    const auto name = j.at("tracker").get<std::string>();
    const auto id = parse_tracker(name);
    if (!id) throw DomainError("unknown tracker '" + name + "'");
    TrackerConfig c = optimized_config(*id);
    c.window_length = j.at("window_length").get<double>();
    c.voicing_threshold = j.at("voicing_threshold").get<double>();
    return {*id, c};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tracker config: ") + e.what());
  }
}

// --- score tables ----------------------------------------------------------

inline void write_score_table(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "stage,param_value,vde,ffe,gpe,fpe\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.6f},{:.6f},{},{}\n", r.stage, r.param_value(), r.report.vde,
                       r.report.ffe, format_optional(r.report.gpe),
                       format_optional(r.report.fpe));
  }
}

// Cross-product tables carry both parameters.
inline void write_exhaustive_table(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "stage,threshold,window_length,vde,ffe,gpe,fpe\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{:.6f},{:.6f},{},{}\n", r.stage, r.threshold, r.window_length,
                       r.report.vde, r.report.ffe, format_optional(r.report.gpe),
                       format_optional(r.report.fpe));
  }
}

inline void write_score_table(const std::filesystem::path& path,
                              const std::vector<ScoreRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_score_table(out, rows);
}

}  // namespace pitchbench
