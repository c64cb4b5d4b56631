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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "pitchbench/pitchbench.hpp"

namespace pb = pitchbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string pct(std::optional<double> v) {
  return v ? fmt::format("{:.2f}%", 100.0 * *v) : std::string("NA");
}

std::string cents(std::optional<double> v) {
  return v ? fmt::format("{:.2f}c", *v) : std::string("NA");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Shared corpus state, rendered once.
struct Corpus {
  pb::CorpusRecipe recipe;
  std::vector<pb::SynthesizedVoice> voices;
  std::vector<pb::DatasetItem> dataset;
  fs::path dir;
  fs::path manifest;
};

Corpus& corpus() {
  static Corpus c = [] {
    Corpus out;
    out.recipe = pb::load_recipe();
    out.voices = pb::render_corpus(out.recipe);
    for (std::size_t i = 0; i < out.voices.size(); ++i) {
      out.dataset.push_back(
          {out.recipe.items[i].id, out.voices[i].audio, out.voices[i].truth});
    }
    out.dir = fs::temp_directory_path() / "pitchbench_acceptance";
    fs::remove_all(out.dir);
    pb::write_corpus(out.recipe, out.dir / "corpus");
    out.manifest = out.dir / "corpus" / "manifest.csv";
    return out;
  }();
  return c;
}

pb::RunPlan optimized_plan() {
  pb::RunPlan plan;
  for (auto id : pb::kAllTrackers) plan.trackers.push_back(pb::builtin_tracker(id));
  plan.variants = {pb::Variant::kOptimized};
  plan.vuv_donor = pb::TrackerId::kNccf;
  plan.group_by = {pb::GroupKey::kCategory};
  return plan;
}

const pb::GroupRow* group(const pb::ComboResult& c, std::string_view value) {
  for (const auto& g : c.groups) {
    if (g.value == value) return &g;
  }
  return nullptr;
}

// --- 1 --------------------------------------------------------------------

struct ScalarReport {
  std::size_t frames = 0, voicing = 0, both = 0, gross = 0;
  std::vector<double> fine;
};

// Direct transcription of the metric definitions.
ScalarReport scalar_compare(const pb::PitchContour& est, const pb::PitchContour& ref) {
  ScalarReport r;
  r.frames = est.size();
  for (std::size_t k = 0; k < est.size(); ++k) {
    const bool ve = est.frames[k].voiced, vr = ref.frames[k].voiced;
    if (ve != vr) {
      r.voicing += 1;
    } else if (ve) {
      r.both += 1;
      const double c = 1200.0 * std::log2(est.frames[k].f0 / ref.frames[k].f0);
      if (std::fabs(c) >= 100.0) {
        r.gross += 1;
      } else {
        r.fine.push_back(c);
      }
    }
  }
  return r;
}

double population_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Outcome criterion_metric_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatches = 0;
  double worst_fpe = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 400);
    const double p_est = u(rng), p_ref = u(rng);
    std::vector<int> ve(n), vr(n);
    std::vector<double> fe(n), fr(n);
    for (std::size_t k = 0; k < n; ++k) {
      vr[k] = u(rng) < p_ref;
      ve[k] = u(rng) < p_est;
      fr[k] = 60.0 * std::pow(25.0, u(rng));
      const double r = u(rng);
      const double dev = r < 0.1 ? (u(rng) < 0.5 ? 1200.0 : -1200.0) * u(rng) + 100.0
                                 : 120.0 * (u(rng) - 0.5);
      fe[k] = std::clamp(fr[k] * std::exp2(dev / 1200.0), 30.0, 3000.0);
    }
    const auto est = pb::make_contour(ve, fe);
    const auto ref = pb::make_contour(vr, fr);
    const auto got = pb::compare(est, ref);
    const auto want = scalar_compare(est, ref);
    bool ok = got.n_frames == want.frames && got.n_voicing_errors == want.voicing &&
              got.n_both_voiced == want.both && got.n_gross == want.gross &&
              got.n_fine == want.fine.size();
    ok = ok && got.vde == static_cast<double>(want.voicing) / static_cast<double>(want.frames);
    ok = ok && got.ffe == static_cast<double>(want.voicing + want.gross) /
                              static_cast<double>(want.frames);
    if (want.both > 0) {
      ok = ok && got.gpe &&
           *got.gpe == static_cast<double>(want.gross) / static_cast<double>(want.both);
    } else {
      ok = ok && !got.gpe;
    }
    if (!want.fine.empty()) {
      const double err = got.fpe ? std::fabs(*got.fpe - population_sd(want.fine)) : 1e9;
      worst_fpe = std::max(worst_fpe, err);
      ok = ok && err <= 1e-9;
    } else {
      ok = ok && !got.fpe;
    }
    if (!ok) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt::format("1000 pairs, {} mismatches, max FPE diff {:.1e}, {:.2f}s", mismatches,
                      worst_fpe, secs)};
}

// --- 2 --------------------------------------------------------------------

Outcome criterion_cents() {
  bool ok = true;
  double worst_octave = 0.0, worst_semitone = 0.0;
  for (double f : {60.0, 440.0, 1500.0}) {
    const double oct = pb::cents_error(2.0 * f, f);
    const double semi = pb::cents_error(std::exp2(1.0 / 12.0) * f, f);
    worst_octave = std::max(worst_octave, std::fabs(oct - 1200.0));
    worst_semitone = std::max(worst_semitone, std::fabs(semi - 100.0));
    ok = ok && std::fabs(oct - 1200.0) <= 1e-9 && std::fabs(semi - 100.0) <= 0.01;
  }
  return {ok, fmt::format("octave |err| {:.1e}, semitone |err| {:.1e}", worst_octave,
                          worst_semitone)};
}

// --- 3, 6, 7 --------------------------------------------------------------

Outcome criterion_clean_floor(const pb::HarnessResult& clean, double secs) {
  bool ok = secs < 120.0;
  std::string detail;
  for (const auto& c : clean.combos) {
    const auto& r = *c.groups.front().report;
    const bool pass = r.ffe < 0.05 && r.fpe && *r.fpe < 20.0;
    ok = ok && pass;
    detail += fmt::format("{} FFE {} FPE {}; ", c.label, pct(r.ffe), cents(r.fpe));
  }
  return {ok, detail + fmt::format("{:.1f}s", secs)};
}

Outcome criterion_register_trend(const pb::HarnessResult& clean) {
  int gpe_ok = 0, fpe_ok = 0;
  std::string detail;
  for (const auto& c : clean.combos) {
    const auto* sop = group(c, "soprano");
    const auto* bar = group(c, "baritone");
    if (!sop || !bar || !sop->report || !bar->report) continue;
    const auto& s = *sop->report;
    const auto& b = *bar->report;
    const bool g = s.gpe.value_or(0.0) <= b.gpe.value_or(0.0);
    const bool f = s.fpe && b.fpe && *s.fpe <= *b.fpe;
    gpe_ok += g;
    fpe_ok += f;
    detail += fmt::format("{} GPE {}/{} FPE {}/{}; ", c.label, pct(s.gpe), pct(b.gpe),
                          cents(s.fpe), cents(b.fpe));
  }
  return {gpe_ok >= 4 && fpe_ok >= 4,
          fmt::format("soprano<=baritone GPE {}/5, FPE {}/5 (sop/bar: {})", gpe_ok, fpe_ok,
                      detail)};
}

Outcome criterion_reverb(const pb::HarnessResult& res, double secs) {
  bool ok = secs < 600.0;
  std::string detail;
  for (const auto& spec : optimized_plan().trackers) {
    const auto label = pb::variant_label(optimized_plan(), spec, pb::Variant::kOptimized);
    std::vector<double> gpe;
    for (double t : res.conditions) {
      const auto* c = res.find(label, t);
      gpe.push_back(c && c->groups.front().report ? c->groups.front().report->gpe.value_or(0.0)
                                                  : std::nan(""));
    }
    // Non-decreasing over the T60 grid with at most one small inversion.
    int inversions = 0;
    bool monotone = true;
    for (std::size_t i = 2; i < gpe.size(); ++i) {
      const double drop = gpe[i - 1] - gpe[i];
      if (drop > 0.0) {
        ++inversions;
        if (drop > 0.003) monotone = false;
      }
    }
    monotone = monotone && inversions <= 1;
    ok = ok && monotone;
    std::string series;
    for (double g : gpe) series += fmt::format("{:.2f} ", 100.0 * g);
    detail += fmt::format("{} [{}]{}; ", label, series, monotone ? "" : " NOT MONOTONE");
    if (spec.builtin == pb::TrackerId::kYin) {
      const bool rise = gpe.back() - gpe.front() >= 0.02;
      ok = ok && rise;
      if (!rise) detail += "YIN rise below 2 pp; ";
    }
  }
  return {ok, detail + fmt::format("{:.1f}s", secs)};
}

// --- 4 --------------------------------------------------------------------

Outcome criterion_postfilter() {
  const auto& data = corpus().dataset;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<pb::ErrorReport> before, after;
  bool vde_identical = true;
  for (const auto& item : data) {
    auto est = item.reference;
    for (auto& f : est.frames) {
      if (f.voiced && u(rng) < 0.05) f.f0 *= u(rng) < 0.5 ? 2.0 : 0.5;
    }
    const auto b = pb::compare(est, item.reference);
    const auto a = pb::compare(pb::postprocess(est), item.reference);
    vde_identical = vde_identical && a.vde == b.vde && a.n_voicing_errors == b.n_voicing_errors;
    before.push_back(b);
    after.push_back(a);
  }
  const auto pb_ = pb::pool(before);
  const auto pa = pb::pool(after);
  const double reduction = 1.0 - pa.gpe.value() / pb_.gpe.value();
  return {reduction >= 0.60 && vde_identical,
          fmt::format("GPE {} -> {} ({:.1f}% reduction), VDE {}", pct(pb_.gpe), pct(pa.gpe),
                      100.0 * reduction, vde_identical ? "bit-identical" : "CHANGED")};
}

// --- 5 --------------------------------------------------------------------

constexpr int kToneRate = 22050;
constexpr double kToneHop = 0.010;

// Three-harmonic tone along an F0 track plus white noise sized so that the
// periodic share of the power equals `periodicity`. Truth is the F0 track
// when `voiced`, all unvoiced otherwise.
pb::DatasetItem tone_item(std::string name, double seconds,
                          const std::function<double(double)>& f0_at, double periodicity,
                          bool voiced, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(seconds * kToneRate);
  pb::Signal s{std::vector<double>(n), kToneRate};
  const double amps[] = {0.3, 0.18, 0.12};
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phase += 2.0 * std::numbers::pi * f0_at(static_cast<double>(i) / kToneRate) / kToneRate;
    for (int h = 0; h < 3; ++h) s.samples[i] += amps[h] * std::sin((h + 1) * phase);
  }
  double tone_power = 0.0;
  for (double a : amps) tone_power += a * a / 2.0;
  const double noise_power = tone_power * (1.0 / periodicity - 1.0);
  if (noise_power > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_power));
    for (double& x : s.samples) x += noise(rng);
  }
  pb::PitchContour truth;
  truth.hop = kToneHop;
  truth.frames.resize(pb::frame_count(n, kToneRate, kToneHop));
  if (voiced) {
    for (std::size_t k = 0; k < truth.frames.size(); ++k) {
      truth.frames[k] = pb::PitchFrame::voiced_at(f0_at(static_cast<double>(k) * kToneHop), 1.0);
    }
  }
  return {std::move(name), std::move(s), std::move(truth)};
}

// Voicing is set by breathy tones of periodicity 0.7 (voiced) and 0.2
// (unvoiced), which only a threshold near 0.4 separates at every window.
// Pitch errors come from clean tones: a 62-66 Hz bass that short windows
// cannot resolve and fast 3:2 note steps that long windows blur.
std::vector<pb::DatasetItem> known_optimum_dataset() {
  std::vector<pb::DatasetItem> items;
  std::uint64_t seed = 1;
  for (double f0 : {150.0, 200.0, 300.0, 440.0}) {
    const auto flat = [f0](double) { return f0; };
    items.push_back(tone_item(fmt::format("breathy_voiced_{:g}", f0), 1.0, flat, 0.7, true,
                              seed++));
    items.push_back(tone_item(fmt::format("breathy_unvoiced_{:g}", f0), 1.0, flat, 0.2, false,
                              seed++));
  }
  for (double f0 : {62.0, 66.0}) {
    items.push_back(tone_item(fmt::format("bass_{:g}", f0), 1.0,
                              [f0](double) { return f0; }, 1.0, true, 0));
  }
  for (double low : {250.0, 330.0}) {
    items.push_back(tone_item(
        fmt::format("steps_{:g}", low), 1.2,
        [low](double t) { return static_cast<int>(t / 0.12) % 2 ? 1.5 * low : low; }, 1.0,
        true, 0));
  }
  return items;
}

Outcome criterion_optimizer() {
  const auto items = known_optimum_dataset();
  pb::SearchSpec spec;
  spec.threshold_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  spec.window_grid = {0.010, 0.025, 0.040, 0.050, 0.075, 0.100};
  const auto def = pb::default_config(pb::TrackerId::kAcf);
  const auto two = pb::optimize(pb::TrackerId::kAcf, items, spec, def);
  const auto full = pb::optimize_exhaustive(pb::TrackerId::kAcf, items, spec, def);
  const bool same = two.config.voicing_threshold == full.config.voicing_threshold &&
                    two.config.window_length == full.config.window_length;

  pb::SearchSpec yin_spec;
  yin_spec.threshold_grid = {pb::default_config(pb::TrackerId::kYin).voicing_threshold};
  yin_spec.window_grid = {0.010, 0.016, 0.025, 0.050, 0.100};
  const auto yin = pb::optimize(pb::TrackerId::kYin, corpus().dataset, yin_spec,
                                pb::default_config(pb::TrackerId::kYin));
  const bool short_window = yin.config.window_length <= 0.016 + 1e-12;
  std::string yin_scores;
  for (const auto& row : yin.scores) {
    yin_scores += fmt::format("{:g}ms:{} ", 1000.0 * row.window_length, pct(row.report.ffe));
  }
  return {same && short_window,
          fmt::format("ACF two-stage ({:g}, {:g} ms, FFE {}) vs exhaustive ({:g}, {:g} ms, FFE "
                      "{}); YIN window {:g} ms [{}]",
                      two.config.voicing_threshold, 1000.0 * two.config.window_length,
                      pct(two.selected_report.ffe), full.config.voicing_threshold,
                      1000.0 * full.config.window_length, pct(full.report.ffe),
                      1000.0 * yin.config.window_length, yin_scores)};
}

// --- 8 --------------------------------------------------------------------

Outcome criterion_rir() {
  bool ok = true;
  double worst = 0.0;
  pb::RoomSpec room;
  for (int sr : {16000, 22050, 44100}) {
    for (double t60 : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      room.t60 = t60;
      const double measured = pb::schroeder_t60(pb::simulate_rir(room, sr));
      const double rel = std::fabs(measured / t60 - 1.0);
      worst = std::max(worst, std::isfinite(rel) ? rel : 1e9);
      ok = ok && rel <= 0.20;
    }
  }
  // Direct path: first non-zero tap versus the propagation delay.
  struct Geometry {
    pb::Vec3 src, mic;
    int sr;
    std::size_t expected;
  };
  std::vector<Geometry> cases = {{{1.0, 1.0, 1.0}, {2.715, 1.0, 1.0}, 44100, 221}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.3, 2.7);
  while (cases.size() < 20) {
    Geometry g{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, 22050, 0};
    const double d = std::hypot(g.src[0] - g.mic[0], g.src[1] - g.mic[1], g.src[2] - g.mic[2]);
    const double x = d / 343.0 * g.sr;
    if (std::fabs(x - std::floor(x) - 0.5) < 0.01) continue;
    g.expected = static_cast<std::size_t>(std::lround(x));
    cases.push_back(g);
  }
  int delay_ok = 0;
  for (const auto& g : cases) {
    pb::RoomSpec r;
    r.source_position = g.src;
    r.mic_position = g.mic;
    r.t60 = 0.2;
    const auto rir = pb::simulate_rir(r, g.sr);
    std::size_t first = 0;
    while (first < rir.taps.size() && rir.taps[first] == 0.0) ++first;
    delay_ok += first == g.expected;
  }
  ok = ok && delay_ok == static_cast<int>(cases.size());
  return {ok, fmt::format("max T60 deviation {:.2f}% over 15 RIRs; direct delay exact {}/{}",
                          100.0 * worst, delay_ok, cases.size())};
}

// --- 9 --------------------------------------------------------------------

Outcome criterion_determinism() {
  pb::RunPlan plan;
  for (auto id : pb::kAllTrackers) plan.trackers.push_back(pb::builtin_tracker(id));
  plan.vuv_donor = pb::TrackerId::kNccf;
  plan.group_by = {pb::GroupKey::kCategory, pb::GroupKey::kMechanism};
  const auto a = corpus().dir / "run_a";
  const auto b = corpus().dir / "run_b";
  const int sa = pb::run(corpus().manifest, plan, a);
  const int sb = pb::run(corpus().manifest, plan, b);
  const auto ca = slurp(a / "results.csv");
  const auto cb = slurp(b / "results.csv");
  const bool json_same = slurp(a / "results.json") == slurp(b / "results.json");
  return {sa == 0 && sb == 0 && !ca.empty() && ca == cb,
          fmt::format("results.csv {} bytes, {}; results.json {}", ca.size(),
                      ca == cb ? "identical" : "DIFFERENT", json_same ? "identical" : "DIFFERENT")};
}

// --- 10 -------------------------------------------------------------------

Outcome criterion_groundtruth() {
  const auto& c = corpus();
  std::vector<pb::ErrorReport> reports;
  double worst = 0.0;
  std::string worst_item;
  for (std::size_t i = 0; i < c.voices.size(); ++i) {
    const auto pair = pb::extract_reference(c.voices[i].egg);
    if (pair.disagreement >= worst) {
      worst = pair.disagreement;
      worst_item = c.recipe.items[i].id;
    }
    reports.push_back(pb::compare(pair.egg_contour, c.voices[i].truth));
  }
  const auto pooled = pb::pool(reports);
  return {worst < 0.02 && pooled.ffe < 0.01,
          fmt::format("max disagreement {} ({}), pooled FFE vs truth {}", pct(worst), worst_item,
                      pct(pooled.ffe))};
}

}  // namespace

int main() {
  pb::set_warning_handler([](std::string_view) {});
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "metric oracle equivalence", criterion_metric_oracle);
  report(2, "cents arithmetic", criterion_cents);

  pb::HarnessResult clean;
  double clean_secs = 0.0;
  report(3, "clean-tracking floor", [&] {
    const auto t0 = Clock::now();
    clean = pb::evaluate(pb::read_manifest(corpus().manifest), optimized_plan());
    clean_secs = seconds_since(t0);
    return criterion_clean_floor(clean, clean_secs);
  });
  report(4, "post-filter effect", criterion_postfilter);
  report(5, "optimizer correctness", criterion_optimizer);
  report(6, "register trend", [&] { return criterion_register_trend(clean); });
  report(7, "reverberation degradation", [&] {
    auto plan = optimized_plan();
    plan.reverb_t60s = {0.1, 0.2, 0.3, 0.4, 0.5};
    const auto t0 = Clock::now();
    const auto res = pb::evaluate(pb::read_manifest(corpus().manifest), plan);
    return criterion_reverb(res, seconds_since(t0));
  });
  report(8, "RIR fidelity", criterion_rir);
  report(9, "determinism", criterion_determinism);
  report(10, "ground-truth pipeline", criterion_groundtruth);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
