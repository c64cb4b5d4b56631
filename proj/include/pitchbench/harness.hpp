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

// Batch evaluation: runs trackers and their variants over a manifest under
// clean and reverberant conditions, then writes pooled and per-file reports
// plus plot data.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "pitchbench/contour.hpp"
#include "pitchbench/corpus.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/manifest.hpp"
#include "pitchbench/metrics.hpp"
#include "pitchbench/optimizer.hpp"
#include "pitchbench/parallel.hpp"
#include "pitchbench/plots.hpp"
#include "pitchbench/postfilter.hpp"
#include "pitchbench/reverb.hpp"
#include "pitchbench/signal.hpp"
#include "pitchbench/trackers.hpp"
#include "pitchbench/wav.hpp"

namespace pitchbench {

inline constexpr int kResultsSchema = 1;

enum class Variant { kDefault, kOptimized, kPostfiltered };

inline constexpr Variant kAllVariants[] = {Variant::kDefault, Variant::kOptimized,
                                           Variant::kPostfiltered};

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kDefault: return "default";
    case Variant::kOptimized: return "optimized";
    case Variant::kPostfiltered: return "postfiltered";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == s) return v;
  }
  return std::nullopt;
}

enum class GroupKey { kCategory, kMechanism, kT60 };

inline std::string_view group_key_name(GroupKey k) {
  switch (k) {
    case GroupKey::kCategory: return "category";
    case GroupKey::kMechanism: return "mechanism";
    case GroupKey::kT60: return "t60";
  }
  return "?";
}

inline std::optional<GroupKey> parse_group_key(std::string_view s) {
  for (GroupKey k : {GroupKey::kCategory, GroupKey::kMechanism, GroupKey::kT60}) {
    if (group_key_name(k) == s) return k;
  }
  return std::nullopt;
}

// A built-in tracker, or an external one whose contours are imported from
// `<import_dir>/<audio stem>.csv`.
struct TrackerSpec {
  std::string name;
  std::optional<TrackerId> builtin;
  std::filesystem::path import_dir;

  bool external() const { return !builtin.has_value(); }
  std::string base_label() const {
    if (builtin) return tracker_label(*builtin);
    std::string s = name.substr(name.find(':') + 1);
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }
};

inline TrackerSpec builtin_tracker(TrackerId id) {
  return {std::string(tracker_name(id)), id, {}};
}

inline TrackerSpec external_tracker(const std::string& name,
                                    const std::filesystem::path& import_dir) {
  return {"external:" + name, std::nullopt, import_dir};
}

// Accepts a built-in name or "external:<name>"; the import directory of an
// external tracker is looked up in `import_dirs` by <name>.
inline TrackerSpec parse_tracker_spec(
    std::string_view text, const std::map<std::string, std::filesystem::path>& import_dirs = {}) {
  if (auto id = parse_tracker(text)) return builtin_tracker(*id);
  constexpr std::string_view kPrefix = "external:";
  if (text.substr(0, kPrefix.size()) == kPrefix && text.size() > kPrefix.size()) {
    const std::string name(text.substr(kPrefix.size()));
    const auto it = import_dirs.find(name);
    return external_tracker(name, it == import_dirs.end() ? std::filesystem::path{} : it->second);
  }
  throw DomainError(fmt::format("unknown tracker '{}'", text));
}

struct RunPlan {
  std::vector<TrackerSpec> trackers;
  std::vector<Variant> variants{Variant::kDefault, Variant::kOptimized, Variant::kPostfiltered};
  // V/UV donor for yin and external contours. Externals fall back to nccf.
  std::optional<TrackerId> vuv_donor;
  std::vector<double> reverb_t60s;  // seconds; the clean condition always runs
  std::vector<GroupKey> group_by;
  int jobs = 1;
  double hop = 0.010;
  Pooling pooling = Pooling::kFrames;
  RoomSpec room;  // t60 is set per condition
  PostFilterConfig postfilter;
  // Per-tracker overrides of the default and optimized presets.
  std::map<TrackerId, TrackerConfig> default_configs;
  std::map<TrackerId, TrackerConfig> optimized_configs;

  TrackerConfig config_for(TrackerId id, Variant v) const {
    const auto& overrides = v == Variant::kDefault ? default_configs : optimized_configs;
    if (auto it = overrides.find(id); it != overrides.end()) return it->second;
    TrackerConfig c = v == Variant::kDefault ? default_config(id) : optimized_config(id);
    c.hop = hop;
    return c;
  }
  bool has_group(GroupKey k) const {
    return std::find(group_by.begin(), group_by.end(), k) != group_by.end();
  }
  // Donor applied to `spec`, if any.
  std::optional<TrackerId> donor_for(const TrackerSpec& spec) const {
    if (spec.external()) return vuv_donor.value_or(TrackerId::kNccf);
    if (vuv_donor && spec.builtin == TrackerId::kYin && *vuv_donor != TrackerId::kYin) {
      return vuv_donor;
    }
    return std::nullopt;
  }
};

inline void validate(const RunPlan& plan) {
  if (plan.trackers.empty()) throw DomainError("run plan: no trackers");
  if (plan.variants.empty()) throw DomainError("run plan: no variants");
  std::set<std::string> names;
  for (const auto& t : plan.trackers) {
    if (!names.insert(t.name).second) {
      throw DomainError(fmt::format("run plan: tracker '{}' listed twice", t.name));
    }
    if (t.external() && t.import_dir.empty()) {
      throw DomainError(fmt::format("run plan: {} has no import directory", t.name));
    }
  }
  std::set<Variant> vs(plan.variants.begin(), plan.variants.end());
  if (vs.size() != plan.variants.size()) throw DomainError("run plan: duplicate variant");
  std::set<double> ts;
  for (double t : plan.reverb_t60s) {
    if (!(t > 0.0)) throw DomainError(fmt::format("run plan: T60 {} s is not positive", t));
    if (!ts.insert(t).second) throw DomainError(fmt::format("run plan: T60 {} s repeated", t));
  }
  if (!(plan.hop > 0.0)) throw DomainError("run plan: hop must be positive");
}

// Report label: base name, "v" when V/UV decisions come from a donor, "u"
// for default parameters and "*" for post-filtered output.
inline std::string variant_label(const RunPlan& plan, const TrackerSpec& spec, Variant v) {
  std::string label = spec.base_label();
  if (plan.donor_for(spec)) label += "v";
  if (v == Variant::kDefault) label += "u";
  if (v == Variant::kPostfiltered) label += "*";
  return label;
}

inline std::string condition_name(double t60) {
  return t60 == 0.0 ? std::string("clean") : fmt::format("{:g}", t60);
}

// --- results ---------------------------------------------------------------

struct FileResult {
  enum class Status { kOk, kSkipped, kError };
  Status status = Status::kOk;
  ErrorReport report;
  std::size_t n_filled = 0;  // frames voiced by the donor and filled
  std::string reason;        // skip reason or error message
};

struct GroupRow {
  std::string key;    // "all", "category" or "mechanism"
  std::string value;  // "all" or the group value
  std::size_t n_files = 0;
  std::optional<ErrorReport> report;  // nullopt when no file contributed
};

struct ComboResult {
  std::string tracker;
  std::string label;
  Variant variant = Variant::kOptimized;
  double t60 = 0.0;  // 0 = clean
  std::vector<FileResult> files;  // manifest order
  std::vector<GroupRow> groups;   // "all" first
};

struct HarnessResult {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> file_names;  // display names, manifest order
  std::vector<ComboResult> combos;      // tracker, variant, condition order
  std::vector<double> conditions;       // 0 (clean), then the T60s

  bool has_errors() const {
    for (const auto& c : combos) {
      for (const auto& f : c.files) {
        if (f.status == FileResult::Status::kError) return true;
      }
    }
    return false;
  }
  const ComboResult* find(std::string_view label, double t60) const {
    for (const auto& c : combos) {
      if (c.label == label && c.t60 == t60) return &c;
    }
    return nullptr;
  }
};

namespace detail {

struct LoadedEntry {
  std::optional<Signal> audio;
  std::optional<PitchContour> reference;
  std::string skip_reason;   // set when the file is skipped
  std::string error;         // set when loading failed
};

inline LoadedEntry load_entry(const ManifestEntry& e, double hop) {
  LoadedEntry out;
  namespace fs = std::filesystem;
  if (!fs::exists(e.reference_path)) {
    out.skip_reason = "missing reference " + e.reference_path;
    return out;
  }
  try {
    out.audio = load_audio(e.audio_path);
    out.reference = import_external_contour(e.reference_path, hop);
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  return out;
}

inline std::optional<ErrorReport> pool_or_empty(const std::vector<ErrorReport>& reports,
                                                Pooling pooling) {
  if (reports.empty()) return std::nullopt;
  return pool_reports(reports, pooling);
}

inline void assemble_groups(ComboResult& combo, const std::vector<ManifestEntry>& entries,
                            const RunPlan& plan) {
  std::vector<ErrorReport> all;
  std::map<std::string, std::vector<ErrorReport>> by_cat, by_mech;
  for (std::size_t i = 0; i < combo.files.size(); ++i) {
    const auto& f = combo.files[i];
    if (f.status != FileResult::Status::kOk) continue;
    all.push_back(f.report);
    by_cat[entries[i].category].push_back(f.report);
    by_mech[entries[i].mechanism].push_back(f.report);
  }
  combo.groups.push_back({"all", "all", all.size(), pool_or_empty(all, plan.pooling)});
  auto add = [&](std::string_view key, const auto& vocab,
                 std::map<std::string, std::vector<ErrorReport>>& groups) {
    for (std::string_view v : vocab) {
      auto it = groups.find(std::string(v));
      if (it == groups.end()) continue;
      combo.groups.push_back({std::string(key), std::string(v), it->second.size(),
                              pool_or_empty(it->second, plan.pooling)});
    }
  };
  if (plan.has_group(GroupKey::kCategory)) add("category", kCategories, by_cat);
  if (plan.has_group(GroupKey::kMechanism)) add("mechanism", kMechanisms, by_mech);
}

inline std::string display_name(const std::string& path, const std::filesystem::path& base) {
  if (base.empty()) return path;
  const auto rel = std::filesystem::path(path).lexically_relative(base);
  return rel.empty() ? path : rel.generic_string();
}

}  // namespace detail

// Loads every manifest item for parameter search. Unlike evaluation, a
// missing reference is an error naming the file.
inline std::vector<DatasetItem> load_dataset(const std::vector<ManifestEntry>& entries,
                                             double hop = 0.010, int jobs = 1) {
  std::vector<DatasetItem> items(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    if (!std::filesystem::exists(e.reference_path)) {
      throw DomainError(fmt::format("{}: missing reference {}", e.audio_path, e.reference_path));
    }
    items[i] = {e.audio_path, load_audio(e.audio_path),
                import_external_contour(e.reference_path, hop)};
  });
  return items;
}

// Renders the synthetic corpus as a dataset with exact references.
inline std::vector<DatasetItem> corpus_dataset(const CorpusRecipe& recipe, int jobs = 1) {
  auto voices = render_corpus(recipe, jobs);
  std::vector<DatasetItem> items;
  items.reserve(voices.size());
  for (std::size_t i = 0; i < voices.size(); ++i) {
    items.push_back({recipe.items[i].id, std::move(voices[i].audio), std::move(voices[i].truth)});
  }
  return items;
}

// Evaluates `plan` over `entries`. Work runs on up to plan.jobs threads;
// results are assembled in manifest order.
inline HarnessResult evaluate(const std::vector<ManifestEntry>& entries, const RunPlan& plan,
                              const std::filesystem::path& base_dir = {}) {
  validate(plan);
  for (const auto& t : plan.trackers) {
    if (t.external() && !std::filesystem::is_directory(t.import_dir)) {
      throw DomainError(fmt::format("{}: import directory {} does not exist", t.name,
                                    t.import_dir.string()));
    }
  }
  HarnessResult result;
  result.entries = entries;
  for (const auto& e : entries) {
    result.file_names.push_back(detail::display_name(e.audio_path, base_dir));
  }
  result.conditions.push_back(0.0);
  for (double t : plan.reverb_t60s) result.conditions.push_back(t);

  const std::size_t n_files = entries.size();
  std::vector<detail::LoadedEntry> loaded(n_files);
  parallel_for(n_files, plan.jobs,
               [&](std::size_t i) { loaded[i] = detail::load_entry(entries[i], plan.hop); });

  // One RIR per (T60, sample rate), aligned to the direct path.
  std::map<std::pair<double, int>, RoomImpulseResponse> rirs;
  for (double t60 : plan.reverb_t60s) {
    for (const auto& l : loaded) {
      if (!l.audio) continue;
      const auto key = std::make_pair(t60, l.audio->sample_rate);
      if (rirs.count(key)) continue;
      RoomSpec room = plan.room;
      room.t60 = t60;
      rirs[key] = align_to_direct(simulate_rir(room, l.audio->sample_rate));
    }
  }

  // Combo layout: tracker-major, then variant, then condition.
  for (const auto& spec : plan.trackers) {
    for (Variant v : plan.variants) {
      for (double t60 : result.conditions) {
        ComboResult c;
        c.tracker = spec.name;
        c.label = variant_label(plan, spec, v);
        c.variant = v;
        c.t60 = t60;
        c.files.resize(n_files);
        result.combos.push_back(std::move(c));
      }
    }
  }
  const std::size_t n_cond = result.conditions.size();
  const std::size_t n_var = plan.variants.size();
  auto combo_at = [&](std::size_t tracker, std::size_t variant, std::size_t cond) -> ComboResult& {
    return result.combos[(tracker * n_var + variant) * n_cond + cond];
  };

  parallel_for(n_cond * n_files, plan.jobs, [&](std::size_t task) {
    const std::size_t ci = task / n_files;
    const std::size_t fi = task % n_files;
    const double t60 = result.conditions[ci];
    const auto& le = loaded[fi];
    auto mark_all = [&](FileResult::Status status, const std::string& reason) {
      for (std::size_t ti = 0; ti < plan.trackers.size(); ++ti) {
        for (std::size_t vi = 0; vi < n_var; ++vi) {
          auto& f = combo_at(ti, vi, ci).files[fi];
          f.status = status;
          f.reason = reason;
        }
      }
    };
    if (!le.skip_reason.empty()) return mark_all(FileResult::Status::kSkipped, le.skip_reason);
    if (!le.error.empty()) return mark_all(FileResult::Status::kError, le.error);

    Signal audio;
    try {
      audio = t60 == 0.0 ? *le.audio
                         : convolve(*le.audio, rirs.at({t60, le.audio->sample_rate}));
    } catch (const std::exception& ex) {
      return mark_all(FileResult::Status::kError, ex.what());
    }

    // Contours per (tracker, default-or-optimized parameters); errors are
    // kept as messages.
    struct Tracked {
      std::optional<PitchContour> contour;
      std::string error;
    };
    std::map<std::pair<TrackerId, bool>, Tracked> cache;
    auto tracked = [&](TrackerId id, bool use_default) -> const Tracked& {
      const auto key = std::make_pair(id, use_default);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
      Tracked t;
      try {
        t.contour = track(id, audio,
                          plan.config_for(id, use_default ? Variant::kDefault : Variant::kOptimized));
      } catch (const std::exception& ex) {
        t.error = fmt::format("{}: {}", tracker_name(id), ex.what());
      }
      return cache.emplace(key, std::move(t)).first->second;
    };

    for (std::size_t ti = 0; ti < plan.trackers.size(); ++ti) {
      const auto& spec = plan.trackers[ti];
      std::optional<PitchContour> imported;
      std::string import_error;
      if (spec.external()) {
        if (t60 != 0.0) {
          for (std::size_t vi = 0; vi < n_var; ++vi) {
            auto& f = combo_at(ti, vi, ci).files[fi];
            f.status = FileResult::Status::kSkipped;
            f.reason = "imported contours exist for the clean condition only";
          }
          continue;
        }
        const auto path =
            spec.import_dir / (std::filesystem::path(entries[fi].audio_path).stem().string() + ".csv");
        try {
          if (!std::filesystem::exists(path)) {
            throw Error("missing imported contour " + path.string());
          }
          imported = import_external_contour(path, plan.hop);
        } catch (const std::exception& ex) {
          import_error = ex.what();
        }
      }
      for (std::size_t vi = 0; vi < n_var; ++vi) {
        const Variant v = plan.variants[vi];
        const bool use_default = v == Variant::kDefault;
        auto& f = combo_at(ti, vi, ci).files[fi];
        try {
          PitchContour est;
          if (spec.external()) {
            if (!imported) throw Error(import_error);
            est = *imported;
          } else {
            const auto& t = tracked(*spec.builtin, use_default);
            if (!t.contour) throw Error(t.error);
            est = *t.contour;
          }
          if (const auto donor = plan.donor_for(spec)) {
            const auto& d = tracked(*donor, use_default);
            if (!d.contour) throw Error("donor " + d.error);
            if (est.size() != d.contour->size()) {
              // Imported contours may differ in length; align to the donor.
              est.frames.resize(d.contour->size());
            }
            auto sub = substitute_vuv(est, *d.contour);
            est = std::move(sub.contour);
            f.n_filled = static_cast<std::size_t>(
                std::count(sub.filled.begin(), sub.filled.end(), true));
          }
          if (v == Variant::kPostfiltered) est = postprocess(est, plan.postfilter);
          f.report = compare(est, *le.reference);
          f.status = FileResult::Status::kOk;
        } catch (const std::exception& ex) {
          f.status = FileResult::Status::kError;
          f.reason = ex.what();
        }
      }
    }
  });

  for (auto& c : result.combos) detail::assemble_groups(c, entries, plan);
  return result;
}

// --- output ----------------------------------------------------------------

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string optional_cell(const std::optional<double>& v) { return format_optional(v); }

inline nlohmann::ordered_json plan_json(const RunPlan& plan) {
  nlohmann::ordered_json j;
  j["trackers"] = nlohmann::ordered_json::array();
  for (const auto& t : plan.trackers) j["trackers"].push_back(t.name);
  j["variants"] = nlohmann::ordered_json::array();
  for (Variant v : plan.variants) j["variants"].push_back(variant_name(v));
  j["vuv_donor"] = plan.vuv_donor ? nlohmann::ordered_json(std::string(tracker_name(*plan.vuv_donor)))
                                  : nlohmann::ordered_json(nullptr);
  j["reverb_t60s"] = plan.reverb_t60s;
  j["group_by"] = nlohmann::ordered_json::array();
  for (GroupKey k : plan.group_by) j["group_by"].push_back(group_key_name(k));
  j["hop"] = plan.hop;
  j["pooling"] = plan.pooling == Pooling::kFrames ? "frames" : "files";
  nlohmann::ordered_json configs = nlohmann::ordered_json::object();
  for (const auto& t : plan.trackers) {
    if (!t.builtin) continue;
    for (Variant v : {Variant::kDefault, Variant::kOptimized}) {
      const auto c = plan.config_for(*t.builtin, v);
      configs[t.name][std::string(variant_name(v))] = {{"window_length", c.window_length},
                                                       {"voicing_threshold", c.voicing_threshold}};
    }
  }
  j["configs"] = configs;
  return j;
}

// Rows: one per label; columns: pooled `metric` per group value (clean
// condition) or per condition.
inline std::string plot_csv(const std::vector<std::string>& columns,
                            const std::vector<PlotSeries>& rows) {
  std::string out = fmt::format("# schema={}\nlabel", kResultsSchema);
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& r : rows) {
    out += r.label;
    for (const auto& v : r.values) out += "," + format_optional(v);
    out += "\n";
  }
  return out;
}

inline PlotData group_plot(const HarnessResult& res, std::string_view key, bool want_fpe,
                           std::string title, std::string y_label) {
  PlotData d;
  d.title = std::move(title);
  d.y_label = std::move(y_label);
  std::set<std::string> present;
  for (const auto& e : res.entries) {
    present.insert(key == "category" ? e.category : e.mechanism);
  }
  std::vector<std::string_view> vocab;
  if (key == "category") {
    vocab.assign(std::begin(kCategories), std::end(kCategories));
  } else {
    vocab.assign(std::begin(kMechanisms), std::end(kMechanisms));
  }
  for (auto v : vocab) {
    if (present.count(std::string(v))) d.x_labels.emplace_back(v);
  }
  for (const auto& c : res.combos) {
    if (c.t60 != 0.0) continue;
    PlotSeries s{c.label, {}};
    for (const auto& x : d.x_labels) {
      std::vector<ErrorReport> reps;
      for (std::size_t i = 0; i < c.files.size(); ++i) {
        const auto& e = res.entries[i];
        if (c.files[i].status != FileResult::Status::kOk) continue;
        if ((key == "category" ? e.category : e.mechanism) == x) reps.push_back(c.files[i].report);
      }
      if (reps.empty()) {
        s.values.push_back(std::nullopt);
      } else {
        const auto p = pool(reps);
        s.values.push_back(want_fpe ? p.fpe : p.gpe);
      }
    }
    d.series.push_back(std::move(s));
  }
  return d;
}

inline PlotData t60_plot(const HarnessResult& res) {
  PlotData d;
  d.title = "GPE by reverberation time";
  d.y_label = "GPE";
  for (double t : res.conditions) d.x_labels.push_back(condition_name(t));
  std::vector<std::string> order;
  std::map<std::string, PlotSeries> by_label;
  for (const auto& c : res.combos) {
    auto [it, inserted] = by_label.try_emplace(c.label, PlotSeries{c.label, {}});
    if (inserted) {
      order.push_back(c.label);
      it->second.values.assign(res.conditions.size(), std::nullopt);
    }
    const auto pos = std::find(res.conditions.begin(), res.conditions.end(), c.t60) -
                     res.conditions.begin();
    const auto& all = c.groups.front();
    if (all.report) it->second.values[static_cast<std::size_t>(pos)] = all.report->gpe;
  }
  for (const auto& l : order) d.series.push_back(by_label[l]);
  return d;
}

inline PlotData to_percent(PlotData d) {
  for (auto& s : d.series) {
    for (auto& v : s.values) {
      if (v) *v *= 100.0;
    }
  }
  d.y_label += " (%)";
  return d;
}

inline std::string status_line(const HarnessResult& res, const ComboResult& c, std::size_t i) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\n", c.label, variant_name(c.variant),
                     condition_name(c.t60), res.file_names[i], c.files[i].reason);
}

}  // namespace detail

inline std::string results_csv(const HarnessResult& res) {
  std::string out = fmt::format("# schema={}\ntracker,label,variant,condition,group_key,"
                                "group_value,n_files,{}\n",
                                kResultsSchema, error_report_csv_header());
  for (const auto& c : res.combos) {
    for (const auto& g : c.groups) {
      out += fmt::format("{},{},{},{},{},{},{},", c.tracker, c.label, variant_name(c.variant),
                         condition_name(c.t60), g.key, g.value, g.n_files);
      out += g.report ? to_csv_row(*g.report) : std::string("NA,NA,NA,NA,0,0,0,0");
      out += "\n";
    }
  }
  return out;
}

inline nlohmann::ordered_json results_json(const HarnessResult& res, const RunPlan& plan) {
  nlohmann::ordered_json j;
  j["schema"] = kResultsSchema;
  j["plan"] = detail::plan_json(plan);
  j["conditions"] = nlohmann::ordered_json::array();
  for (double t : res.conditions) j["conditions"].push_back(condition_name(t));
  auto& results = j["results"] = nlohmann::ordered_json::array();
  for (const auto& c : res.combos) {
    nlohmann::ordered_json r;
    r["tracker"] = c.tracker;
    r["label"] = c.label;
    r["variant"] = variant_name(c.variant);
    r["condition"] = condition_name(c.t60);
    r["t60"] = c.t60;
    auto& groups = r["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : c.groups) {
      groups.push_back({{"key", g.key},
                        {"value", g.value},
                        {"n_files", g.n_files},
                        {"report", g.report ? to_json(*g.report) : nlohmann::ordered_json(nullptr)}});
    }
    auto& files = r["files"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.files.size(); ++i) {
      const auto& f = c.files[i];
      if (f.status != FileResult::Status::kOk) continue;
      const auto& e = res.entries[i];
      files.push_back({{"file", res.file_names[i]},
                       {"singer_id", e.singer_id},
                       {"category", e.category},
                       {"mechanism", e.mechanism},
                       {"exercise", e.exercise},
                       {"n_filled", f.n_filled},
                       {"report", to_json(f.report)}});
    }
    results.push_back(std::move(r));
  }
  auto listing = [&](FileResult::Status status) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : res.combos) {
      for (std::size_t i = 0; i < c.files.size(); ++i) {
        if (c.files[i].status != status) continue;
        arr.push_back({{"label", c.label},
                       {"variant", variant_name(c.variant)},
                       {"condition", condition_name(c.t60)},
                       {"file", res.file_names[i]},
                       {"reason", c.files[i].reason}});
      }
    }
    return arr;
  };
  j["skipped"] = listing(FileResult::Status::kSkipped);
  j["errors"] = listing(FileResult::Status::kError);
  return j;
}

// Writes results.csv, results.json, the three plot-data CSVs with their SVG
// renderings, skipped.txt and errors.txt.
inline void write_outputs(const HarnessResult& res, const RunPlan& plan,
                          const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  detail::write_text(out_dir / "results.csv", results_csv(res));
  detail::write_text(out_dir / "results.json", results_json(res, plan).dump(2) + "\n");

  const auto cat = detail::group_plot(res, "category", false, "GPE by voice category", "GPE");
  const auto mech = detail::group_plot(res, "mechanism", true, "FPE by laryngeal mechanism",
                                       "FPE (cents)");
  const auto t60 = detail::t60_plot(res);
  detail::write_text(out_dir / "gpe_by_category.csv", detail::plot_csv(cat.x_labels, cat.series));
  detail::write_text(out_dir / "fpe_by_mechanism.csv",
                     detail::plot_csv(mech.x_labels, mech.series));
  detail::write_text(out_dir / "gpe_by_t60.csv", detail::plot_csv(t60.x_labels, t60.series));
  detail::write_text(out_dir / "gpe_by_category.svg", render_bar_chart(detail::to_percent(cat)));
  detail::write_text(out_dir / "fpe_by_mechanism.svg", render_bar_chart(mech));
  detail::write_text(out_dir / "gpe_by_t60.svg", render_line_chart(detail::to_percent(t60)));

  std::string skipped, errors;
  for (const auto& c : res.combos) {
    for (std::size_t i = 0; i < c.files.size(); ++i) {
      if (c.files[i].status == FileResult::Status::kOk) continue;
      skipped += detail::status_line(res, c, i);
      if (c.files[i].status == FileResult::Status::kError) errors += detail::status_line(res, c, i);
    }
  }
  detail::write_text(out_dir / "skipped.txt", skipped);
  detail::write_text(out_dir / "errors.txt", errors);
}

// Reads the manifest, evaluates the plan and writes every output. Returns 0
// on success and 2 when any file failed; skipped files alone are not
// failures.
inline int run(const std::filesystem::path& manifest, const RunPlan& plan,
               const std::filesystem::path& out_dir) {
  const auto entries = read_manifest(manifest);
  const auto res = evaluate(entries, plan, manifest.parent_path());
  write_outputs(res, plan, out_dir);
  return res.has_errors() ? 2 : 0;
}

}  // namespace pitchbench
