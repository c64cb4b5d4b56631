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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pitchbench/signal.hpp"
#include "pitchbench/synthvoice.hpp"
#include "pitchbench/wav.hpp"
#include "test_util.hpp"

namespace pitchbench {
namespace {

// Independent little-endian WAV writer for multi-channel PCM16 fixtures.
std::vector<std::uint8_t> pcm16_wav(const std::vector<std::vector<std::int16_t>>& channels,
                                    std::uint32_t rate, std::uint16_t tag = 1,
                                    std::uint16_t bits = 16) {
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const auto n = static_cast<std::uint32_t>(channels[0].size());
  const std::uint32_t data = n * nch * 2;
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag4 = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tag4("RIFF");
  u32(36 + data);
  tag4("WAVE");
  tag4("fmt ");
  u32(16);
  u16(tag);
  u16(nch);
  u32(rate);
  u32(rate * nch * 2);
  u16(static_cast<std::uint16_t>(nch * 2));
  u16(bits);
  tag4("data");
  u32(data);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& ch : channels) u16(static_cast<std::uint16_t>(ch[i]));
  }
  return b;
}

TEST(SignalTest, ValidateRejectsBadRateAndNonFinite) {
  EXPECT_THROW(validate(Signal{{0.0}, 0}), DomainError);
  EXPECT_THROW(validate(Signal{{0.0, std::nan("")}, 8000}), DomainError);
  EXPECT_THROW(make_signal({1.0, INFINITY}, 8000), DomainError);
  EXPECT_NO_THROW(make_signal({0.0, 0.5}, 8000));
}

TEST(SignalTest, FrameCountIsFloorOfDurationOverHopPlusOne) {
  EXPECT_EQ(frame_count(1000, 1000, 0.010), 101u);
  EXPECT_EQ(frame_count(999, 1000, 0.010), 100u);
  EXPECT_EQ(frame_count(22050, 22050, 0.010), 101u);
  EXPECT_THROW(frame_count(100, 1000, 0.0), DomainError);
}

TEST(SignalTest, FrameCenteredOnFrameTime) {
  Signal s{std::vector<double>(1000), 1000};
  for (std::size_t i = 0; i < s.size(); ++i) s.samples[i] = static_cast<double>(i);
  const auto grid = FrameGrid::for_signal(s, 0.010, 0.030);
  const auto f = frame_signal(s, grid, 50);
  ASSERT_EQ(f.size(), 31u);
  EXPECT_EQ(f[15], 500.0);
  EXPECT_EQ(f.front(), 485.0);
  EXPECT_EQ(f.back(), 515.0);
}

TEST(SignalTest, FirstFrameIsZeroPaddedOnTheLeft) {
  Signal s{std::vector<double>(1000, 1.0), 1000};
  const auto grid = FrameGrid::for_signal(s, 0.010, 0.030);
  const auto f = frame_signal(s, grid, 0);
  ASSERT_EQ(f.size(), 31u);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(f[i], 0.0) << i;
  for (std::size_t i = 15; i < 31; ++i) EXPECT_EQ(f[i], 1.0) << i;
}

TEST(SignalTest, FrameIndexOutOfRangeThrows) {
  Signal s{std::vector<double>(1000), 1000};
  const auto grid = FrameGrid::for_signal(s, 0.010, 0.030);
  EXPECT_THROW(frame_signal(s, grid, grid.n_frames), BoundsError);
}

TEST(SignalTest, EvenWindowLengthIsMadeOdd) {
  EXPECT_EQ(odd_window_samples(0.030, 1000), 31u);
  EXPECT_EQ(odd_window_samples(0.031, 1000), 31u);
  EXPECT_EQ(odd_window_samples(0.0, 1000), 1u);
}

TEST(SignalTest, RectangularFrameSumMatchesBruteForce) {
  const double c = 0.25;
  Signal s{std::vector<double>(1000, c), 1000};
  const auto grid = FrameGrid::for_signal(s, 0.010, 0.030);
  double total = 0.0;
  double expected = 0.0;
  for (std::size_t k = 0; k < grid.n_frames; ++k) {
    for (double v : frame_signal(s, grid, k)) total += v;
    // Count in-range samples of the centred window directly.
    const long center = static_cast<long>(k * 10);
    for (long i = center - 15; i <= center + 15; ++i) {
      if (i >= 0 && i < 1000) expected += c;
    }
  }
  EXPECT_NEAR(total, expected, 1e-9);
  // Interior frames see the full window.
  double interior = 0.0;
  for (double v : frame_signal(s, grid, 50)) interior += v;
  EXPECT_NEAR(interior, 31 * c, 1e-12);
}

TEST(SignalTest, FramingIsPure) {
  const auto s = testing::white_noise(0.5, 8000, 0.3, 11);
  const auto grid = FrameGrid::for_signal(s, 0.010, 0.025);
  EXPECT_EQ(frame_signal(s, grid, 17), frame_signal(s, grid, 17));
}

TEST(SignalTest, WindowsAreSymmetric) {
  for (auto type : {WindowType::kHann, WindowType::kBlackman}) {
    const auto w = make_window(type, 101);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], w[100 - i], 1e-15);
    EXPECT_NEAR(w[50], 1.0, 1e-12);
    EXPECT_GE(w.front(), 0.0);
  }
}

TEST(WavTest, Pcm16IsScaledBy32768) {
  const auto bytes = pcm16_wav({{0, 16384, -32768}}, 8000);
  const auto s = decode_wav(bytes);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.sample_rate, 8000);
  EXPECT_EQ(s.samples[0], 0.0);
  EXPECT_EQ(s.samples[1], 0.5);
  EXPECT_EQ(s.samples[2], -1.0);
}

TEST(WavTest, StereoChannelSelectionAndAveraging) {
  const auto bytes = pcm16_wav({{16384, 8192}, {-16384, 0}}, 44100);
  LoadOptions left;
  left.channel = 0;
  const auto l = decode_wav(bytes, "stereo", left);
  EXPECT_EQ(l.sample_rate, 44100);
  EXPECT_EQ(l.samples, (std::vector<double>{0.5, 0.25}));
  LoadOptions right;
  right.channel = 1;
  EXPECT_EQ(decode_wav(bytes, "stereo", right).samples, (std::vector<double>{-0.5, 0.0}));
  EXPECT_EQ(decode_wav(bytes).samples, (std::vector<double>{0.0, 0.125}));
  LoadOptions missing;
  missing.channel = 2;
  EXPECT_THROW(decode_wav(bytes, "stereo", missing), BoundsError);
}

TEST(WavTest, UnsupportedEncodingIsNamed) {
  const auto bytes = pcm16_wav({{0, 1}}, 8000, /*tag=*/7, /*bits=*/8);
  try {
    decode_wav(bytes, "law.wav");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("mu-law"), std::string::npos) << e.what();
  }
  const auto pcm24 = pcm16_wav({{0, 1}}, 8000, 1, 24);
  EXPECT_THROW(decode_wav(pcm24), FormatError);
}

TEST(WavTest, TruncatedFileReportsByteOffset) {
  auto bytes = pcm16_wav({{1, 2, 3, 4}}, 8000);
  bytes.resize(bytes.size() - 3);
  try {
    decode_wav(bytes, "cut.wav");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset 44"), std::string::npos) << e.what();
  }
  const std::vector<std::uint8_t> tiny{'R', 'I', 'F'};
  EXPECT_THROW(decode_wav(tiny), ParseError);
}

TEST(WavTest, NotRiffIsFormatError) {
  std::vector<std::uint8_t> bytes(64, 0);
  std::memcpy(bytes.data(), "JUNK", 4);
  EXPECT_THROW(decode_wav(bytes), FormatError);
}

TEST(WavTest, SkipsUnknownChunks) {
  auto bytes = pcm16_wav({{16384}}, 8000);
  // Insert an odd-sized LIST chunk (with pad byte) after the fmt chunk.
  const std::vector<std::uint8_t> extra{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
  EXPECT_EQ(decode_wav(bytes).samples, (std::vector<double>{0.5}));
}

TEST(WavTest, SynthesizedVoiceRoundTripsBitExactly) {
  VoiceSpec spec;
  spec.segments = {Segment::sustain(220.0, 0.3)};
  spec.voice_register = VoiceRegister::kCountertenor;
  const auto voice = synthesize(spec);
  const auto dir = testing::temp_dir("wav_roundtrip");
  save_audio(dir / "v.wav", voice.audio);
  const auto loaded = load_audio(dir / "v.wav");
  ASSERT_EQ(loaded.size(), voice.audio.size());
  EXPECT_EQ(loaded.sample_rate, voice.audio.sample_rate);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    ASSERT_EQ(loaded.samples[i], static_cast<double>(static_cast<float>(voice.audio.samples[i])))
        << i;
  }
  // A second pass is lossless.
  save_audio(dir / "v2.wav", loaded);
  EXPECT_EQ(load_audio(dir / "v2.wav").samples, loaded.samples);
}

TEST(WavTest, Pcm16RoundTrip) {
  Signal s{{0.0, 0.5, -1.0, 0.25}, 16000};
  const auto back = decode_wav(encode_wav(s, SampleFormat::kPcm16));
  EXPECT_EQ(back.samples, s.samples);
}

TEST(WavTest, MissingFileThrows) {
  EXPECT_THROW(load_audio("/nonexistent/file.wav"), Error);
}

}  // namespace
}  // namespace pitchbench
