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

// Synthetic singing-like test signals with exactly known F0.
//
// The source is a band-limited glottal pulse train built by additive
// synthesis from the Fourier series of a Rosenberg pulse, driven by an
// accumulated phase so the intended F0 contour is exact by construction.
// A four-resonance vowel filter per register, applied with zero phase,
// shapes the acoustic output.
// The EGG channel is a low-passed contact waveform sharing the same phase.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/fft.hpp"
#include "pitchbench/signal.hpp"

namespace pitchbench {

enum class VoiceRegister { kBaritone, kCountertenor, kSoprano };
enum class Mechanism { kM1, kM2 };

inline std::string_view register_name(VoiceRegister r) {
  switch (r) {
    case VoiceRegister::kBaritone: return "baritone";
    case VoiceRegister::kCountertenor: return "countertenor";
    case VoiceRegister::kSoprano: return "soprano";
  }
  return "?";
}

inline std::optional<VoiceRegister> parse_register(std::string_view s) {
  for (auto r : {VoiceRegister::kBaritone, VoiceRegister::kCountertenor,
                 VoiceRegister::kSoprano}) {
    if (register_name(r) == s) return r;
  }
  return std::nullopt;
}

inline std::string_view mechanism_name(Mechanism m) {
  return m == Mechanism::kM1 ? "M1" : "M2";
}

inline std::optional<Mechanism> parse_mechanism(std::string_view s) {
  if (s == "M1") return Mechanism::kM1;
  if (s == "M2") return Mechanism::kM2;
  return std::nullopt;
}

// Note A4 = 440 Hz; `semitones` relative to it.
inline double note_hz(double semitones_from_a4) {
  return 440.0 * std::exp2(semitones_from_a4 / 12.0);
}

struct FrequencyRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Baritone F2-F4, countertenor F3-F5, soprano C4-C6.
inline FrequencyRange register_range(VoiceRegister r) {
  switch (r) {
    case VoiceRegister::kBaritone: return {note_hz(-28), note_hz(-4)};
    case VoiceRegister::kCountertenor: return {note_hz(-16), note_hz(8)};
    case VoiceRegister::kSoprano: return {note_hz(-9), note_hz(15)};
  }
  return {};
}

struct Segment {
  enum class Kind { kSustain, kGlide, kSilence };
  Kind kind = Kind::kSilence;
  double f_start = 0.0;  // Hz
  double f_end = 0.0;    // Hz; equals f_start for sustains
  double duration = 0.0;  // s
  double vibrato_rate = 0.0;   // Hz
  double vibrato_depth = 0.0;  // cents, peak deviation
  double gain_start = 1.0;
  double gain_end = 1.0;

  static Segment sustain(double f0, double duration, double vibrato_rate = 0.0,
                         double vibrato_depth = 0.0) {
    return {Kind::kSustain, f0, f0, duration, vibrato_rate, vibrato_depth, 1.0, 1.0};
  }
  // Log-linear glide from f_start to f_end.
  static Segment glide(double f_start, double f_end, double duration) {
    return {Kind::kGlide, f_start, f_end, duration, 0.0, 0.0, 1.0, 1.0};
  }
  static Segment silence(double duration) {
    return {Kind::kSilence, 0.0, 0.0, duration, 0.0, 0.0, 0.0, 0.0};
  }
  Segment& with_gain(double start, double end) {
    gain_start = start;
    gain_end = end;
    return *this;
  }
  bool voiced() const { return kind != Kind::kSilence; }

  // F0 at time u seconds into the segment.
  double f0_at(double u) const {
    double f = f_start;
    if (kind == Kind::kGlide && duration > 0.0) {
      f = f_start * std::pow(f_end / f_start, u / duration);
    }
    if (vibrato_depth != 0.0 && vibrato_rate > 0.0) {
      f *= std::exp2(vibrato_depth / 1200.0 *
                     std::sin(2.0 * std::numbers::pi * vibrato_rate * u));
    }
    return f;
  }
};

struct VoiceSpec {
  std::vector<Segment> segments;
  VoiceRegister voice_register = VoiceRegister::kBaritone;
  Mechanism mechanism = Mechanism::kM1;
  int sample_rate = 22050;
  double hop = 0.010;
  // Relative standard deviation of the per-cycle period perturbation.
  double jitter = 0.0;
  // RMS of additive white noise on the acoustic channel.
  double noise_level = 0.0;
  std::uint64_t seed = 1;
  // Peak amplitude of both output channels before noise.
  double peak = 0.5;
  // Raised-cosine ramp at every voiced onset and offset.
  double ramp = 0.010;
  // Skip the register range check (for custom test signals).
  bool enforce_register_range = true;
};

struct SynthesizedVoice {
  Signal audio;
  Signal egg;
  PitchContour truth;  // intended F0 on the hop grid
};

inline double spec_duration(const VoiceSpec& spec) {
  double d = 0.0;
  for (const auto& s : spec.segments) d += s.duration;
  return d;
}

// Intended F0 at time t, or nullopt inside silence. Segment intervals are
// closed, so a frame exactly on a voiced/silence boundary counts as voiced.
inline std::optional<double> intended_f0(const VoiceSpec& spec, double t) {
  double start = 0.0;
  constexpr double kEps = 1e-9;
  for (const auto& s : spec.segments) {
    const double end = start + s.duration;
    if (s.voiced() && t >= start - kEps && t <= end + kEps) {
      return s.f0_at(std::clamp(t - start, 0.0, s.duration));
    }
    start = end;
  }
  return std::nullopt;
}

inline void validate(const VoiceSpec& spec) {
  if (spec.sample_rate <= 0) throw DomainError("voice spec: sample rate must be positive");
  if (!(spec.hop > 0.0)) throw DomainError("voice spec: hop must be positive");
  if (spec.segments.empty()) throw DomainError("voice spec: no segments");
  if (spec.jitter < 0.0 || spec.jitter > 0.1) {
    throw DomainError("voice spec: jitter must be in [0, 0.1]");
  }
  const auto range = register_range(spec.voice_register);
  const double slack = std::exp2(1.0 / 24.0);  // quarter tone
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    if (!(s.duration > 0.0)) {
      throw DomainError(fmt::format("segment {}: duration must be positive", i));
    }
    if (!s.voiced()) continue;
    const double excursion = std::exp2(std::abs(s.vibrato_depth) / 1200.0);
    for (double f : {s.f_start, s.f_end}) {
      const double lo = f / excursion, hi = f * excursion;
      if (!(lo >= 60.0 && hi <= 1500.0)) {
        throw DomainError(fmt::format(
            "segment {}: F0 {} Hz (with vibrato {}-{}) outside 60-1500 Hz", i, f, lo, hi));
      }
      if (spec.enforce_register_range &&
          (f < range.lo / slack || f > range.hi * slack)) {
        throw DomainError(fmt::format("segment {}: {} Hz outside the {} range {:.1f}-{:.1f} Hz",
                                      i, f, register_name(spec.voice_register),
                                      range.lo, range.hi));
      }
    }
    if (s.gain_start < 0.0 || s.gain_end < 0.0) {
      throw DomainError(fmt::format("segment {}: negative gain", i));
    }
  }
}

namespace detail {

using HarmonicTable = std::vector<std::complex<double>>;

// Rosenberg glottal flow over one cycle, phase in [0, 1).
inline double rosenberg_flow(double phase, double open_quotient, double speed_quotient) {
  const double tp = open_quotient * speed_quotient / (1.0 + speed_quotient);
  const double tn = open_quotient / (1.0 + speed_quotient);
  if (phase < tp) return 0.5 * (1.0 - std::cos(std::numbers::pi * phase / tp));
  if (phase < tp + tn) return std::cos(std::numbers::pi * (phase - tp) / (2.0 * tn));
  return 0.0;
}

// Complex Fourier coefficients c_k (k = 0 .. n_harmonics) of one period of
// `shape`, so that shape(phase) ~ Re sum_k c_k exp(i 2 pi k phase).
template <typename Shape>
HarmonicTable fourier_series(Shape shape, std::size_t n_harmonics) {
  constexpr std::size_t kPoints = 8192;
  std::vector<double> y(kPoints);
  for (std::size_t m = 0; m < kPoints; ++m) {
    y[m] = shape(static_cast<double>(m) / kPoints);
  }
  HarmonicTable c(n_harmonics + 1);
  for (std::size_t k = 1; k <= n_harmonics; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < kPoints; ++m) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * m) / kPoints;
      acc += y[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    c[k] = 2.0 * acc / static_cast<double>(kPoints);
  }
  return c;
}

constexpr std::size_t kMaxHarmonics = 400;

struct PulseTables {
  HarmonicTable source;  // radiated flow derivative
  HarmonicTable contact;  // EGG
};

inline PulseTables make_pulse_tables(Mechanism m) {
  // M1: short open phase, abrupt closure, rich spectrum.
  // M2: long open phase and an extra -6 dB/octave tilt.
  const double oq = m == Mechanism::kM1 ? 0.5 : 0.75;
  const double sq = 2.0;
  auto flow = [=](double p) { return rosenberg_flow(p, oq, sq); };
  PulseTables t;
  const auto g = fourier_series(flow, kMaxHarmonics);
  t.source.resize(g.size());
  t.contact.resize(g.size());
  for (std::size_t k = 1; k < g.size(); ++k) {
    // Differentiation multiplies harmonic k by i 2 pi k.
    auto d = g[k] * std::complex<double>(0.0, 2.0 * std::numbers::pi * static_cast<double>(k));
    if (m == Mechanism::kM2) d /= static_cast<double>(k);
    t.source[k] = d;
    const double lp = 1.0 / (1.0 + std::pow(static_cast<double>(k) / 10.0, 2.0));
    t.contact[k] = -g[k] * lp;
  }
  return t;
}

inline const PulseTables& pulse_tables(Mechanism m) {
  static const PulseTables m1 = make_pulse_tables(Mechanism::kM1);
  static const PulseTables m2 = make_pulse_tables(Mechanism::kM2);
  return m == Mechanism::kM1 ? m1 : m2;
}

struct Formant {
  double freq;
  double bandwidth;
};

// Open /a/-like vowels; the soprano set is slightly darker, as sopranos
// commonly sing it in their middle range.
inline std::vector<Formant> vowel_formants(VoiceRegister r) {
  switch (r) {
    case VoiceRegister::kBaritone:
      return {{600, 60}, {1040, 70}, {2250, 110}, {2450, 120}};
    case VoiceRegister::kCountertenor:
      return {{650, 70}, {1080, 80}, {2650, 120}, {2900, 130}};
    case VoiceRegister::kSoprano:
      return {{700, 80}, {1100, 90}, {2800, 120}, {3500, 130}};
  }
  return {};
}

// Magnitude response of a cascade of unity-DC-gain two-pole resonators,
// applied with zero phase so the filter adds no delay and the audio stays
// aligned with the truth contour.
inline double formant_gain(const std::vector<Formant>& formants, double freq, int sample_rate) {
  double g = 1.0;
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq / sample_rate);
  for (const auto& f : formants) {
    if (f.freq >= sample_rate / 2.0) continue;
    const double r = std::exp(-std::numbers::pi * f.bandwidth / sample_rate);
    const double theta = 2.0 * std::numbers::pi * f.freq / sample_rate;
    const double a1 = -2.0 * r * std::cos(theta);
    const double a2 = r * r;
    g *= (1.0 + a1 + a2) / std::abs(1.0 + a1 * z1 + a2 * z1 * z1);
  }
  return g;
}

inline void apply_formants(std::vector<double>& x, const std::vector<Formant>& formants,
                           int sample_rate) {
  if (x.empty()) return;
  // Padding keeps the circular wrap of the resonances' tails negligible.
  const auto pad = static_cast<std::size_t>(sample_rate / 10);
  const std::size_t n = fft::next_pow2(x.size() + 2 * pad);
  std::vector<double> buf(n, 0.0);
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(pad));
  auto spec = fft::rfft(buf, n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] *= formant_gain(formants, static_cast<double>(k) * sample_rate / n, sample_rate);
  }
  const auto y = fft::irfft(std::move(spec), n);
  std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(pad), x.size(), x.begin());
}

inline void normalize_peak(std::vector<double>& x, double peak) {
  const double p = peak_abs(x);
  if (p > 0.0) {
    for (double& v : x) v *= peak / p;
  }
}

}  // namespace detail

inline SynthesizedVoice synthesize(const VoiceSpec& spec) {
  validate(spec);
  const int sr = spec.sample_rate;
  const double total = spec_duration(spec);
  const auto n = static_cast<std::size_t>(std::llround(total * sr));

  // Per-sample segment index and amplitude envelope.
  std::vector<double> seg_start;
  {
    double t = 0.0;
    for (const auto& s : spec.segments) {
      seg_start.push_back(t);
      t += s.duration;
    }
  }
  const auto& tables = detail::pulse_tables(spec.mechanism);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw_jitter = [&] {
    if (spec.jitter <= 0.0) return 1.0;
    return 1.0 + spec.jitter * std::clamp(normal(rng), -3.0, 3.0);
  };

  std::vector<double> source(n, 0.0), contact(n, 0.0);
  double phase = 0.0;  // cycles
  double cycle_factor = draw_jitter();
  std::size_t si = 0;
  const double nyquist_guard = 0.45 * sr;
  const double taper = 0.05 * sr;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    while (si + 1 < spec.segments.size() && t >= seg_start[si + 1]) ++si;
    const auto& seg = spec.segments[si];
    if (!seg.voiced()) continue;
    const double u = t - seg_start[si];
    const double f = seg.f0_at(u) * cycle_factor;
    double gain = seg.gain_start +
                  (seg.gain_end - seg.gain_start) * std::clamp(u / seg.duration, 0.0, 1.0);
    // Onset/offset ramps where the voiced run meets silence or the edges.
    const bool run_starts = si == 0 || !spec.segments[si - 1].voiced();
    const bool run_ends = si + 1 == spec.segments.size() || !spec.segments[si + 1].voiced();
    if (spec.ramp > 0.0) {
      if (run_starts && u < spec.ramp) {
        gain *= 0.5 - 0.5 * std::cos(std::numbers::pi * u / spec.ramp);
      }
      const double left = seg.duration - u;
      if (run_ends && left < spec.ramp) {
        gain *= 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(left, 0.0) / spec.ramp);
      }
    }

    const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * phase);
    std::complex<double> zk = z;
    double s = 0.0, c = 0.0;
    for (std::size_t k = 1; k < tables.source.size(); ++k, zk *= z) {
      const double fk = static_cast<double>(k) * f;
      if (fk >= nyquist_guard) break;
      const double w = std::min(1.0, (nyquist_guard - fk) / taper);
      s += w * (tables.source[k] * zk).real();
      c += w * (tables.contact[k] * zk).real();
    }
    source[i] = gain * s;
    contact[i] = gain * c;

    phase += f / sr;
    if (phase >= 1.0) {
      phase -= std::floor(phase);
      cycle_factor = draw_jitter();
    }
  }

  detail::apply_formants(source, detail::vowel_formants(spec.voice_register), sr);
  detail::normalize_peak(source, spec.peak);
  detail::normalize_peak(contact, spec.peak);
  if (spec.noise_level > 0.0) {
    std::mt19937_64 noise_rng(spec.seed ^ 0x9E3779B97F4A7C15ull);
    std::normal_distribution<double> noise(0.0, spec.noise_level);
    for (double& v : source) v += noise(noise_rng);
  }

  SynthesizedVoice out;
  out.audio = Signal{std::move(source), sr};
  out.egg = Signal{std::move(contact), sr};
  out.truth.hop = spec.hop;
  const std::size_t n_frames = frame_count(n, sr, spec.hop);
  out.truth.frames.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    if (auto f = intended_f0(spec, static_cast<double>(k) * spec.hop)) {
      out.truth.frames[k] = PitchFrame::voiced_at(*f, 1.0);
    }
  }
  return out;
}

}  // namespace pitchbench
