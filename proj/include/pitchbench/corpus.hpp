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

// The synthetic evaluation corpus: a JSON recipe of voice specs, rendered
// to audio, EGG and truth contours on demand or written to disk together
// with a manifest.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/manifest.hpp"
#include "pitchbench/parallel.hpp"
#include "pitchbench/synthvoice.hpp"
#include "pitchbench/wav.hpp"

#ifndef PITCHBENCH_DATA_DIR
#define PITCHBENCH_DATA_DIR "data"
#endif

namespace pitchbench {

struct CorpusItem {
  std::string id;
  std::string singer_id;
  std::string exercise;
  VoiceSpec spec;

  std::string category() const { return std::string(register_name(spec.voice_register)); }
  std::string mechanism() const { return std::string(mechanism_name(spec.mechanism)); }
};

struct CorpusRecipe {
  std::vector<CorpusItem> items;
};

inline std::filesystem::path default_recipe_path() {
  return std::filesystem::path(PITCHBENCH_DATA_DIR) / "corpus_recipe.json";
}

inline Segment segment_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  const double duration = j.at("duration").get<double>();
  Segment s;
  if (type == "silence") {
    s = Segment::silence(duration);
  } else if (type == "sustain") {
    s = Segment::sustain(j.at("f0").get<double>(), duration, j.value("vibrato_rate", 0.0),
                         j.value("vibrato_depth", 0.0));
  } else if (type == "glide") {
    s = Segment::glide(j.at("f_start").get<double>(), j.at("f_end").get<double>(), duration);
  } else {
    throw ParseError(fmt::format("unknown segment type '{}'", type));
  }
  if (s.voiced()) s.with_gain(j.value("gain_start", 1.0), j.value("gain_end", 1.0));
  return s;
}

inline CorpusRecipe parse_recipe(const nlohmann::json& doc) {
  CorpusRecipe recipe;
  try {
    const int sr = doc.value("sample_rate", 22050);
    const double hop = doc.value("hop", 0.01);
    const double jitter = doc.value("jitter", 0.0);
    const double noise = doc.value("noise_level", 0.0);
    const double peak = doc.value("peak", 0.5);
    for (const auto& j : doc.at("items")) {
      CorpusItem item;
      item.id = j.at("id").get<std::string>();
      item.singer_id = j.value("singer_id", std::string("synthetic"));
      item.exercise = j.value("exercise", std::string());
      const auto reg = parse_register(j.at("register").get<std::string>());
      const auto mech = parse_mechanism(j.at("mechanism").get<std::string>());
      if (!reg) throw ParseError(fmt::format("item {}: unknown register", item.id));
      if (!mech) throw ParseError(fmt::format("item {}: unknown mechanism", item.id));
      VoiceSpec& s = item.spec;
      s.voice_register = *reg;
      s.mechanism = *mech;
      s.sample_rate = j.value("sample_rate", sr);
      s.hop = hop;
      s.jitter = j.value("jitter", jitter);
      s.noise_level = j.value("noise_level", noise);
      s.peak = peak;
      s.seed = j.value("seed", std::uint64_t{1});
      for (const auto& seg : j.at("segments")) s.segments.push_back(segment_from_json(seg));
      validate(s);
      recipe.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("corpus recipe: {}", e.what()));
  } catch (const DomainError& e) {
    throw ParseError(fmt::format("corpus recipe: {}", e.what()));
  }
  return recipe;
}

inline CorpusRecipe load_recipe(const std::filesystem::path& path = default_recipe_path()) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open corpus recipe {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_recipe(doc);
}

inline std::vector<SynthesizedVoice> render_corpus(const CorpusRecipe& recipe, int jobs = 1) {
  std::vector<SynthesizedVoice> out(recipe.items.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = synthesize(recipe.items[i].spec); });
  return out;
}

// Writes <id>.wav, <id>_egg.wav and <id>_truth.csv per item plus
// manifest.csv (paths relative to out_dir). Returns the manifest entries.
inline std::vector<ManifestEntry> write_corpus(const CorpusRecipe& recipe,
                                               const std::filesystem::path& out_dir,
                                               int jobs = 1) {
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestEntry> entries(recipe.items.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const auto& item = recipe.items[i];
    const auto voice = synthesize(item.spec);
    save_audio(out_dir / (item.id + ".wav"), voice.audio, SampleFormat::kFloat32);
    save_audio(out_dir / (item.id + "_egg.wav"), voice.egg, SampleFormat::kFloat32);
    write_contour_csv(out_dir / (item.id + "_truth.csv"), voice.truth);
    entries[i] = {item.id + ".wav", item.id + "_truth.csv", item.singer_id,
                  item.category(),  item.mechanism(),        item.exercise};
  });
  write_manifest(out_dir / "manifest.csv", entries);
  return entries;
}

}  // namespace pitchbench
