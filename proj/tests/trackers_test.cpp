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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pitchbench/metrics.hpp"
#include "pitchbench/synthvoice.hpp"
#include "pitchbench/trackers.hpp"
#include "test_util.hpp"

namespace pitchbench {
namespace {

using testing::sine;
using testing::white_noise;

// Sum of equal-amplitude harmonics 1..n of f0.
Signal harmonic_tone(double f0, int n, double seconds, int rate, double amplitude = 0.1) {
  Signal s = sine(f0, seconds, rate, 0.0);
  for (int h = 1; h <= n; ++h) {
    const auto part = sine(h * f0, seconds, rate, amplitude, 0.3 * h);
    for (std::size_t i = 0; i < s.size(); ++i) s.samples[i] += part.samples[i];
  }
  return s;
}

// Synthetic sustained vowel. Exactly periodic when `jitter` is zero.
Signal vowel(double f0, double seconds, VoiceRegister reg, double jitter = 0.005,
             double noise = 0.01) {
  VoiceSpec spec;
  spec.segments = {Segment::sustain(f0, seconds)};
  spec.voice_register = reg;
  spec.jitter = jitter;
  spec.noise_level = noise;
  spec.seed = 11;
  spec.enforce_register_range = false;
  return synthesize(spec).audio;
}

double median_voiced_f0(const PitchContour& c) {
  std::vector<double> f;
  for (const auto& fr : c.frames) {
    if (fr.voiced) f.push_back(fr.f0);
  }
  if (f.empty()) return 0.0;
  std::nth_element(f.begin(), f.begin() + f.size() / 2, f.end());
  return f[f.size() / 2];
}

// Fraction of interior frames (10% trimmed at each end) voiced within
// `cents` of `f0`.
double interior_accuracy(const PitchContour& c, double f0, double cents) {
  const std::size_t lo = c.size() / 10, hi = c.size() - c.size() / 10;
  std::size_t good = 0;
  for (std::size_t k = lo; k < hi; ++k) {
    const auto& fr = c.frames[k];
    if (fr.voiced && std::abs(cents_error(fr.f0, f0)) < cents) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(hi - lo);
}

double unvoiced_fraction(const PitchContour& c) {
  return 1.0 - static_cast<double>(c.voiced_count()) / static_cast<double>(c.size());
}

class SilenceWarnings : public ::testing::Test {
 protected:
  void SetUp() override {
    previous_ = set_warning_handler([this](std::string_view m) { warnings_.emplace_back(m); });
  }
  void TearDown() override { set_warning_handler(previous_); }
  std::vector<std::string> warnings_;
  WarningHandler previous_;
};

TEST(PresetTest, DefaultsAndOptimizedValues) {
  EXPECT_EQ(default_config(TrackerId::kYin).window_length, 0.016);
  EXPECT_EQ(optimized_config(TrackerId::kYin).window_length, 0.010);
  EXPECT_EQ(default_config(TrackerId::kYin).voicing_threshold, 0.10);
  EXPECT_EQ(default_config(TrackerId::kAcf).voicing_threshold, 0.45);
  EXPECT_EQ(optimized_config(TrackerId::kAcf).voicing_threshold, 0.25);
  EXPECT_EQ(default_config(TrackerId::kAcf).window_length, 0.040);
  EXPECT_EQ(default_config(TrackerId::kNccf).window_length, 0.040);
  EXPECT_EQ(default_config(TrackerId::kSrh).window_length, 0.100);
  EXPECT_EQ(optimized_config(TrackerId::kSrh).window_length, 0.125);
  EXPECT_EQ(default_config(TrackerId::kSrh).voicing_threshold, 0.07);
  EXPECT_EQ(optimized_config(TrackerId::kSrh).voicing_threshold, 0.065);
  EXPECT_EQ(default_config(TrackerId::kSsh).window_length, 0.100);
  EXPECT_EQ(optimized_config(TrackerId::kSsh).window_length, 0.100);
  EXPECT_EQ(default_config(TrackerId::kSsh).voicing_threshold, 0.07);
  EXPECT_EQ(optimized_config(TrackerId::kSsh).voicing_threshold, 0.095);
  for (auto id : kAllTrackers) {
    const auto c = default_config(id);
    EXPECT_EQ(c.f0_min, 60.0);
    EXPECT_EQ(c.f0_max, 1500.0);
    EXPECT_EQ(c.hop, 0.010);
    EXPECT_EQ(c.n_harmonics, 5);
  }
}

TEST(PresetTest, NamesRoundTrip) {
  for (auto id : kAllTrackers) EXPECT_EQ(parse_tracker(tracker_name(id)), id);
  EXPECT_FALSE(parse_tracker("praat").has_value());
  EXPECT_EQ(tracker_label(TrackerId::kNccf), "NCCF");
}

TEST_F(SilenceWarnings, ConfigValidation) {
  const auto s = sine(200, 0.1, 8000);
  TrackerConfig bad = default_config(TrackerId::kAcf);
  bad.f0_min = 500;
  bad.f0_max = 400;
  EXPECT_THROW(track_acf(s, bad), DomainError);
  bad = default_config(TrackerId::kAcf);
  bad.f0_max = 5000;
  EXPECT_THROW(track_acf(s, bad), DomainError);
  bad = default_config(TrackerId::kAcf);
  bad.hop = 0;
  EXPECT_THROW(track_acf(s, bad), DomainError);

  TrackerConfig short_window = default_config(TrackerId::kAcf);
  short_window.window_length = 0.020;
  track_acf(s, short_window);
  ASSERT_FALSE(warnings_.empty());
  EXPECT_NE(warnings_[0].find("two periods"), std::string::npos);
}

TEST(YinTest, SineAt440) {
  const auto c = track_yin(sine(440, 1.0, 44100), default_config(TrackerId::kYin));
  EXPECT_GE(interior_accuracy(c, 440.0, 10.0), 0.95);
}

TEST(YinTest, SilenceIsUnvoiced) {
  const Signal s{std::vector<double>(8000, 0.0), 16000};
  EXPECT_EQ(track_yin(s, default_config(TrackerId::kYin)).voiced_count(), 0u);
}

TEST(YinTest, FormantFilteredPulseTrainAt100Hz) {
  const auto c = track_yin(vowel(100.0, 1.0, VoiceRegister::kBaritone, 0.0, 0.0),
                           default_config(TrackerId::kYin));
  EXPECT_NEAR(cents_error(median_voiced_f0(c), 100.0), 0.0, 1.0);
}

TEST(AcfTest, SineAt220) {
  const auto c = track_acf(sine(220, 1.0, 16000), default_config(TrackerId::kAcf));
  EXPECT_GE(interior_accuracy(c, 220.0, 5.0), 0.95);
}

TEST(AcfTest, WhiteNoiseMostlyUnvoiced) {
  const auto c = track_acf(white_noise(2.0, 16000, 0.3, 5), default_config(TrackerId::kAcf));
  EXPECT_GE(unvoiced_fraction(c), 0.9);
}

TEST(AcfTest, LevelInvariant) {
  const auto loud = sine(220, 0.5, 16000, 1.0);
  auto quiet = loud;
  for (double& v : quiet.samples) v *= 0.001;
  const auto cfg = default_config(TrackerId::kAcf);
  const auto a = track_acf(loud, cfg);
  const auto b = track_acf(quiet, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_EQ(a.frames[k].voiced, b.frames[k].voiced) << k;
    if (a.frames[k].voiced) ASSERT_NEAR(a.frames[k].f0, b.frames[k].f0, 1e-6 * a.frames[k].f0);
  }
}

TEST(NccfTest, SineAt440) {
  const auto c = track_nccf(sine(440, 1.0, 44100), default_config(TrackerId::kNccf));
  EXPECT_GE(interior_accuracy(c, 440.0, 5.0), 0.95);
}

TEST(NccfTest, StrongEvenHarmonicsStayOnFundamental) {
  // Second and fourth harmonics dominate the fundamental.
  const int rate = 16000;
  const double f0 = 150.0;
  Signal s = sine(f0, 1.0, rate, 0.2);
  for (auto [h, a] : {std::pair{2, 0.5}, std::pair{3, 0.1}, std::pair{4, 0.4}}) {
    const auto part = sine(h * f0, 1.0, rate, a, 0.7 * h);
    for (std::size_t i = 0; i < s.size(); ++i) s.samples[i] += part.samples[i];
  }
  const auto c = track_nccf(s, default_config(TrackerId::kNccf));
  // No voiced run shorter than three frames sits an octave away from both
  // neighbours.
  std::vector<int> octave_off;
  for (const auto& f : c.frames) {
    octave_off.push_back(f.voiced && std::abs(cents_error(f.f0, f0)) > 600.0);
  }
  for (std::size_t k = 0; k < octave_off.size();) {
    if (!octave_off[k]) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < octave_off.size() && octave_off[e]) ++e;
    EXPECT_GE(e - k, 3u) << "octave spike at frame " << k;
    k = e;
  }
  EXPECT_GE(interior_accuracy(c, f0, 50.0), 0.95);
}

TEST(NccfTest, ToneBurstBoundaries) {
  const int rate = 16000;
  Signal s{std::vector<double>(rate, 0.0), rate};
  const auto tone = sine(300, 1.0, rate, 0.5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((i / 1600) % 2 == 0) s.samples[i] = tone.samples[i];
  }
  const auto c = track_nccf(s, default_config(TrackerId::kNccf));
  // Truth: frame k is voiced when its centre lies in a tone burst.
  std::vector<int> truth(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) truth[k] = ((k * 160) / 1600) % 2 == 0 && k * 160 < 16000;
  std::vector<std::size_t> truth_edges, est_edges;
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (truth[k] != truth[k - 1]) truth_edges.push_back(k);
    if (c.frames[k].voiced != c.frames[k - 1].voiced) est_edges.push_back(k);
  }
  ASSERT_EQ(est_edges.size(), truth_edges.size());
  for (std::size_t i = 0; i < truth_edges.size(); ++i) {
    EXPECT_LE(std::abs(static_cast<long>(est_edges[i]) - static_cast<long>(truth_edges[i])), 2)
        << "edge " << i;
  }
}

TEST(SrhTest, SyntheticVowelAt200Hz) {
  const int rate = 16000;
  const auto c = track_srh(harmonic_tone(200.0, 10, 1.0, rate), default_config(TrackerId::kSrh));
  EXPECT_GE(interior_accuracy(c, 200.0, 10.0), 0.95);
  const auto v = track_srh(vowel(200.0, 1.0, VoiceRegister::kCountertenor),
                           default_config(TrackerId::kSrh));
  EXPECT_GE(interior_accuracy(v, 200.0, 10.0), 0.95);
}

TEST(SrhTest, PureSineArgmaxAtFundamental) {
  // Tones of 100 and 110 Hz keep every harmonic multiple and midpoint off
  // the tone itself.
  for (double f : {100.0, 110.0}) {
    const auto c = track_ssh(sine(f, 1.0, 16000), default_config(TrackerId::kSsh));
    EXPECT_GE(interior_accuracy(c, f, 10.0), 0.95) << f;
  }
}

TEST(SshTest, SyntheticVowelAt200Hz) {
  const auto c = track_ssh(harmonic_tone(200.0, 10, 1.0, 16000), default_config(TrackerId::kSsh));
  EXPECT_GE(interior_accuracy(c, 200.0, 10.0), 0.95);
  const auto v = track_ssh(vowel(200.0, 1.0, VoiceRegister::kCountertenor),
                           default_config(TrackerId::kSsh));
  EXPECT_GE(interior_accuracy(v, 200.0, 10.0), 0.95);
}

TEST(SshTest, InterHarmonicEnergyLowersScore) {
  const int rate = 16000;
  const auto clean = harmonic_tone(200.0, 6, 1.0, rate);
  auto polluted = clean;
  const auto extra = sine(300.0, 1.0, rate, 0.05);
  for (std::size_t i = 0; i < polluted.size(); ++i) polluted.samples[i] += extra.samples[i];
  auto cfg = default_config(TrackerId::kSsh);
  const auto a = track_ssh(clean, cfg);
  const auto b = track_ssh(polluted, cfg);
  const std::size_t k = a.size() / 2;
  ASSERT_TRUE(a.frames[k].voiced);
  ASSERT_TRUE(b.frames[k].voiced);
  EXPECT_NEAR(cents_error(b.frames[k].f0, 200.0), 0.0, 10.0);
  EXPECT_LT(b.frames[k].score, a.frames[k].score);
}

TEST(SshTest, EqualsSrhWithOrderZero) {
  const auto s = vowel(330.0, 0.5, VoiceRegister::kSoprano);
  auto cfg = default_config(TrackerId::kSrh);
  cfg.lpc_order = 0;
  EXPECT_EQ(track_srh(s, cfg), track_ssh(s, cfg));
}

TEST(SshTest, ResonantVowelStaysInRange) {
  const auto s = vowel(700.0, 0.5, VoiceRegister::kSoprano);
  for (auto id : {TrackerId::kSrh, TrackerId::kSsh}) {
    const auto cfg = default_config(id);
    EXPECT_NO_THROW(validate(track(id, s, cfg), cfg.f0_min, cfg.f0_max));
  }
}

class AllTrackers : public ::testing::TestWithParam<TrackerId> {};

TEST_P(AllTrackers, ContourInvariantsOnFuzzInputs) {
  const TrackerId id = GetParam();
  const int rate = 16000;
  std::vector<Signal> inputs;
  inputs.push_back(white_noise(0.5, rate, 0.3, 17));
  inputs.push_back(Signal{std::vector<double>(8000, 0.0), rate});
  Signal clicks{std::vector<double>(8000, 0.0), rate};
  for (std::size_t i = 0; i < clicks.size(); i += 997) clicks.samples[i] = 1.0;
  inputs.push_back(clicks);
  inputs.push_back(Signal{std::vector<double>(8000, 0.7), rate});
  inputs.push_back(Signal{std::vector<double>(37, 0.1), rate});
  inputs.push_back(harmonic_tone(90.0, 8, 0.5, rate));
  const auto cfg = default_config(id);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto c = track(id, inputs[i], cfg);
    EXPECT_EQ(c.size(), frame_count(inputs[i].size(), rate, cfg.hop)) << i;
    EXPECT_NO_THROW(validate(c, cfg.f0_min, cfg.f0_max)) << i;
  }
}

TEST_P(AllTrackers, AmplitudeScaleInvariant) {
  const TrackerId id = GetParam();
  const auto base = vowel(180.0, 0.6, VoiceRegister::kCountertenor);
  const auto cfg = optimized_config(id);
  const auto ref = track(id, base, cfg);
  for (double c : {0.001, 7.0}) {
    auto scaled = base;
    for (double& v : scaled.samples) v *= c;
    const auto got = track(id, scaled, cfg);
    ASSERT_EQ(got.size(), ref.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      ASSERT_EQ(got.frames[k].voiced, ref.frames[k].voiced) << "c=" << c << " k=" << k;
      if (got.frames[k].voiced) {
        ASSERT_NEAR(got.frames[k].f0, ref.frames[k].f0, 1e-6 * ref.frames[k].f0) << k;
      }
    }
  }
}

TEST_P(AllTrackers, EmptySignalThrows) {
  EXPECT_THROW(track(GetParam(), Signal{{}, 16000}, default_config(GetParam())), DomainError);
}

INSTANTIATE_TEST_SUITE_P(Trackers, AllTrackers, ::testing::ValuesIn(kAllTrackers),
                         [](const auto& info) { return std::string(tracker_name(info.param)); });

}  // namespace
}  // namespace pitchbench
