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

// pitchbench command-line front end.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include "json.hpp"

#include "pitchbench/pitchbench.hpp"

namespace fs = std::filesystem;
namespace pb = pitchbench;

namespace {

pb::TrackerId require_tracker(const std::string& name) {
  const auto id = pb::parse_tracker(name);
  if (!id) throw pb::DomainError(fmt::format("unknown tracker '{}'", name));
  return *id;
}

pb::Pooling parse_pooling(const std::string& s) {
  if (s == "frames") return pb::Pooling::kFrames;
  if (s == "files") return pb::Pooling::kFileAverage;
  throw pb::DomainError(fmt::format("unknown pooling '{}' (frames or files)", s));
}

pb::AbsorptionModel parse_absorption(const std::string& s) {
  if (s == "calibrated") return pb::AbsorptionModel::kCalibrated;
  if (s == "eyring") return pb::AbsorptionModel::kEyring;
  if (s == "sabine") return pb::AbsorptionModel::kSabine;
  throw pb::DomainError(fmt::format("unknown absorption model '{}'", s));
}

pb::Vec3 to_vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw pb::DomainError(fmt::format("{} needs three values", what));
  return {v[0], v[1], v[2]};
}

struct RoomOptions {
  std::vector<double> dims{3.0, 4.0, 5.0};
  std::vector<double> source{1.0, 1.5, 1.5};
  std::vector<double> mic{2.0, 2.5, 1.5};
  std::string absorption = "calibrated";

  void add(CLI::App* cmd) {
    cmd->add_option("--room", dims, "Room dimensions in metres (x,y,z)")
        ->delimiter(',')
        ->expected(3);
    cmd->add_option("--source", source, "Source position in metres")->delimiter(',')->expected(3);
    cmd->add_option("--mic", mic, "Microphone position in metres")->delimiter(',')->expected(3);
    cmd->add_option("--absorption", absorption, "calibrated, eyring or sabine");
  }
  pb::RoomSpec spec() const {
    pb::RoomSpec r;
    r.dimensions = to_vec3(dims, "--room");
    r.source_position = to_vec3(source, "--source");
    r.mic_position = to_vec3(mic, "--mic");
    r.absorption = parse_absorption(absorption);
    return r;
  }
};

// --- eval ------------------------------------------------------------------

struct EvalOptions {
  std::string manifest;
  std::vector<std::string> trackers{"yin", "acf", "nccf", "srh", "ssh"};
  std::vector<std::string> variants{"default", "optimized", "postfiltered"};
  std::string vuv_donor;
  std::vector<double> t60s;
  std::vector<std::string> group_by;
  std::vector<std::string> imports;
  std::vector<std::string> configs;
  std::string pooling = "frames";
  std::string out = "results";
  int jobs = 0;
  RoomOptions room;
};

int run_eval(const EvalOptions& o) {
  std::map<std::string, fs::path> import_dirs;
  for (const auto& imp : o.imports) {
    const auto eq = imp.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw pb::DomainError(fmt::format("--import expects NAME=DIR, got '{}'", imp));
    }
    import_dirs[imp.substr(0, eq)] = imp.substr(eq + 1);
  }
  pb::RunPlan plan;
  for (const auto& t : o.trackers) plan.trackers.push_back(pb::parse_tracker_spec(t, import_dirs));
  plan.variants.clear();
  for (const auto& v : o.variants) {
    const auto parsed = pb::parse_variant(v);
    if (!parsed) throw pb::DomainError(fmt::format("unknown variant '{}'", v));
    plan.variants.push_back(*parsed);
  }
  if (!o.vuv_donor.empty()) plan.vuv_donor = require_tracker(o.vuv_donor);
  plan.reverb_t60s = o.t60s;
  for (const auto& g : o.group_by) {
    const auto parsed = pb::parse_group_key(g);
    if (!parsed) throw pb::DomainError(fmt::format("unknown group '{}'", g));
    plan.group_by.push_back(*parsed);
  }
  for (const auto& path : o.configs) {
    std::ifstream in(path);
    if (!in) throw pb::Error("cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw pb::ParseError(fmt::format("{}: {}", path, e.what()));
    }
    const auto [id, cfg] = pb::config_from_json(j);
    plan.optimized_configs[id] = cfg;
  }
  plan.jobs = o.jobs;
  plan.pooling = parse_pooling(o.pooling);
  plan.room = o.room.spec();

  const int status = pb::run(o.manifest, plan, o.out);
  if (status != 0) {
    std::ifstream errors(fs::path(o.out) / "errors.txt");
    std::cerr << "some files failed:\n" << errors.rdbuf();
  }
  std::cout << fmt::format("wrote {}\n", (fs::path(o.out) / "results.csv").string());
  return status;
}

// --- optimize --------------------------------------------------------------

struct OptimizeCliOptions {
  std::string manifest;
  bool corpus = false;
  std::string tracker;
  std::vector<double> thresholds;
  std::vector<double> windows;
  bool exhaustive = false;
  std::string pooling = "frames";
  std::string out = "optimize";
  int jobs = 0;
};

int run_optimize(const OptimizeCliOptions& o) {
  const auto id = require_tracker(o.tracker);
  if (o.manifest.empty() == !o.corpus) {
    throw pb::DomainError("optimize needs exactly one of --manifest or --corpus");
  }
  const auto dataset = o.corpus ? pb::corpus_dataset(pb::load_recipe(), o.jobs)
                                : pb::load_dataset(pb::read_manifest(o.manifest), 0.010, o.jobs);
  pb::SearchSpec spec = pb::default_search_spec(id);
  if (!o.thresholds.empty()) spec.threshold_grid = o.thresholds;
  if (!o.windows.empty()) spec.window_grid = o.windows;
  pb::OptimizeOptions opts;
  opts.pooling = parse_pooling(o.pooling);
  opts.jobs = o.jobs;

  const fs::path out(o.out);
  fs::create_directories(out);
  const auto result = pb::optimize(id, dataset, spec, pb::default_config(id), opts);
  pb::write_score_table(out / "scores.csv", result.scores);
  std::ofstream(out / "config.json") << pb::config_to_json(id, result.config).dump(2) << "\n";
  std::cout << fmt::format("{}: window {} s, threshold {}, pooled FFE {:.4f} (default {:.4f}){}\n",
                           pb::tracker_name(id), result.config.window_length,
                           result.config.voicing_threshold, result.selected_report.ffe,
                           result.default_report.ffe,
                           result.kept_default ? "; default kept" : "");
  if (o.exhaustive) {
    const auto ex = pb::optimize_exhaustive(id, dataset, spec, pb::default_config(id), opts);
    std::ofstream table(out / "exhaustive.csv");
    pb::write_exhaustive_table(table, ex.scores);
    std::cout << fmt::format("exhaustive: window {} s, threshold {}, pooled FFE {:.4f}\n",
                             ex.config.window_length, ex.config.voicing_threshold, ex.report.ffe);
  }
  return 0;
}

// --- groundtruth -----------------------------------------------------------

struct GroundTruthOptions {
  std::vector<std::string> eggs;
  std::string out = "references";
  double max_disagreement = 0.05;
  std::optional<int> channel;
};

int run_groundtruth(const GroundTruthOptions& o) {
  const fs::path out(o.out);
  fs::create_directories(out);
  std::vector<std::string> flagged;
  for (const auto& path : o.eggs) {
    pb::LoadOptions load;
    load.channel = o.channel;
    const auto egg = pb::load_audio(path, load);
    const auto pair = pb::extract_reference(egg);
    const auto stem = fs::path(path).stem().string();
    pb::write_contour_csv(out / (stem + "_ref.csv"), pair.egg_contour);
    pb::write_contour_csv(out / (stem + "_degg.csv"), pair.degg_contour);
    const bool excluded = pb::flag_for_exclusion(pair, o.max_disagreement);
    if (excluded) flagged.push_back(path);
    std::cout << fmt::format("{}: disagreement {:.4f}{}\n", path, pair.disagreement,
                             excluded ? " (excluded)" : "");
  }
  pb::write_exclusions(out / "exclusions.txt", flagged);
  return 0;
}

// --- synth / rir -----------------------------------------------------------

int run_synth(const std::string& recipe, const std::string& out, int jobs) {
  const auto r = recipe.empty() ? pb::load_recipe() : pb::load_recipe(recipe);
  const auto entries = pb::write_corpus(r, out, jobs);
  std::cout << fmt::format("wrote {} items and {}\n", entries.size(),
                           (fs::path(out) / "manifest.csv").string());
  return 0;
}

int run_rir(const std::vector<double>& t60s, int sample_rate, const RoomOptions& room,
            const std::string& out) {
  fs::create_directories(out);
  for (double t60 : t60s) {
    auto spec = room.spec();
    spec.t60 = t60;
    const auto rir = pb::simulate_rir(spec, sample_rate);
    const auto path = fs::path(out) / fmt::format("rir_t60_{:g}.wav", t60);
    pb::save_rir(path, rir);
    std::cout << fmt::format("{}: requested T60 {:g} s, measured {:.4f} s, direct delay {} samples\n",
                             path.string(), t60, pb::schroeder_t60(rir), rir.direct_delay);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitchbench: pitch tracking benchmark for singing voice"};
  app.require_subcommand(1);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate trackers over a manifest");
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--trackers", eval.trackers, "yin,acf,nccf,srh,ssh or external:NAME")
      ->delimiter(',');
  eval_cmd->add_option("--variants", eval.variants, "default,optimized,postfiltered")
      ->delimiter(',');
  eval_cmd->add_option("--vuv-donor", eval.vuv_donor, "Tracker whose V/UV decisions replace yin's");
  eval_cmd->add_option("--t60", eval.t60s, "Reverberation times in seconds")->delimiter(',');
  eval_cmd->add_option("--group-by", eval.group_by, "category,mechanism,t60")->delimiter(',');
  eval_cmd->add_option("--import", eval.imports, "External contours: NAME=DIR");
  eval_cmd->add_option("--optimized-config", eval.configs,
                       "Tuned config JSON written by 'optimize' (repeatable)");
  eval_cmd->add_option("--pooling", eval.pooling, "frames or files");
  eval_cmd->add_option("--out", eval.out, "Output directory");
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads (0 = all cores)");
  eval.room.add(eval_cmd);

  OptimizeCliOptions opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Two-stage parameter search");
  opt_cmd->add_option("--tracker", opt.tracker, "Tracker to tune")->required();
  opt_cmd->add_option("--manifest", opt.manifest, "Manifest CSV")->check(CLI::ExistingFile);
  opt_cmd->add_flag("--corpus", opt.corpus, "Use the built-in synthetic corpus");
  opt_cmd->add_option("--thresholds", opt.thresholds, "Threshold grid")->delimiter(',');
  opt_cmd->add_option("--windows", opt.windows, "Window grid in seconds")->delimiter(',');
  opt_cmd->add_flag("--exhaustive", opt.exhaustive, "Also search the full cross product");
  opt_cmd->add_option("--pooling", opt.pooling, "frames or files");
  opt_cmd->add_option("--out", opt.out, "Output directory");
  opt_cmd->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)");

  GroundTruthOptions gt;
  auto* gt_cmd = app.add_subcommand("groundtruth", "Extract reference contours from EGG");
  gt_cmd->add_option("egg", gt.eggs, "EGG WAV files")->required()->check(CLI::ExistingFile);
  gt_cmd->add_option("--out", gt.out, "Output directory");
  gt_cmd->add_option("--max-disagreement", gt.max_disagreement,
                     "Exclusion threshold on EGG/dEGG disagreement");
  gt_cmd->add_option("--channel", gt.channel, "Channel holding the EGG in multi-channel files");

  std::string recipe, synth_out = "corpus";
  int synth_jobs = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Render the synthetic corpus");
  synth_cmd->add_option("--recipe", recipe, "Corpus recipe JSON")->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--jobs", synth_jobs, "Worker threads (0 = all cores)");

  std::vector<double> rir_t60s{0.1, 0.2, 0.3, 0.4, 0.5};
  int rir_rate = 22050;
  std::string rir_out = "rirs";
  RoomOptions rir_room;
  auto* rir_cmd = app.add_subcommand("rir", "Write simulated room impulse responses");
  rir_cmd->add_option("--t60", rir_t60s, "Reverberation times in seconds")->delimiter(',');
  rir_cmd->add_option("--sample-rate", rir_rate, "Sample rate in Hz");
  rir_cmd->add_option("--out", rir_out, "Output directory");
  rir_room.add(rir_cmd);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*eval_cmd) return run_eval(eval);
    if (*opt_cmd) return run_optimize(opt);
    if (*gt_cmd) return run_groundtruth(gt);
    if (*synth_cmd) return run_synth(recipe, synth_out, synth_jobs);
    if (*rir_cmd) return run_rir(rir_t60s, rir_rate, rir_room, rir_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
