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

// The five pitch trackers. Each maps (Signal, TrackerConfig) to a contour on
// the hop grid t_k = k * hop, k = 0 .. floor(duration / hop):
//
//   yin   cumulative-mean-normalized difference with an absolute dip threshold
//   acf   windowed autocorrelation divided by the window's autocorrelation
//   nccf  normalized cross-correlation candidates + Viterbi path selection
//   srh   summation of residual harmonics (LPC residual spectrum)
//   ssh   summation of spectral harmonics (signal spectrum)

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/contour.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/kernels.hpp"
#include "pitchbench/signal.hpp"

namespace pitchbench {

enum class TrackerId { kYin, kAcf, kNccf, kSrh, kSsh };

inline constexpr std::array<TrackerId, 5> kAllTrackers = {
    TrackerId::kYin, TrackerId::kAcf, TrackerId::kNccf, TrackerId::kSrh,
    TrackerId::kSsh};

inline std::string_view tracker_name(TrackerId id) {
  switch (id) {
    case TrackerId::kYin: return "yin";
    case TrackerId::kAcf: return "acf";
    case TrackerId::kNccf: return "nccf";
    case TrackerId::kSrh: return "srh";
    case TrackerId::kSsh: return "ssh";
  }
  return "?";
}

// Upper-case display name used in report labels.
inline std::string tracker_label(TrackerId id) {
  std::string s(tracker_name(id));
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline std::optional<TrackerId> parse_tracker(std::string_view name) {
  for (TrackerId id : kAllTrackers) {
    if (tracker_name(id) == name) return id;
  }
  return std::nullopt;
}

// Whether the tracker's voicing_threshold is a V/UV decision threshold that
// parameter search may tune. YIN's threshold only selects the period dip.
inline bool supports_voicing_threshold(TrackerId id) {
  return id != TrackerId::kYin;
}

struct TrackerConfig {
  double f0_min = 60.0;   // Hz
  double f0_max = 1500.0;  // Hz
  double hop = 0.010;      // s
  double window_length = 0.040;  // s
  // yin: absolute dip threshold on the normalized difference.
  // acf: normalized autocorrelation peak needed for a voiced frame.
  // nccf: NCCF peak at which voiced and unvoiced local costs break even.
  // srh/ssh: harmonic-summation score needed for a voiced frame.
  double voicing_threshold = 0.45;
  int n_harmonics = 5;

  // srh: LPC order, -1 selects 2 + kHz of the sample rate.
  int lpc_order = -1;
  // srh/ssh: spacing of the log-frequency F0 grid.
  double grid_step_cents = 10.0;

  // acf/nccf: frames whose peak amplitude relative to the global peak falls
  // below this ratio lean unvoiced.
  double silence_threshold = 0.03;
  // acf: candidate strength penalty per octave below f0_max's lag.
  double octave_cost = 0.01;

  // nccf path search.
  int n_candidates = 8;
  double transition_cost = 0.4;  // per octave of F0 change between frames
  double voicing_switch_cost = 0.2;
  double lag_weight = 0.3;  // bias toward short lags, scaled by tau / tau_max

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

// Presets. The defaults are each method's stock settings; the optimized
// presets are the singing-voice adaptations (window length for yin/srh,
// voicing threshold for acf/srh/ssh).
inline TrackerConfig default_config(TrackerId id) {
  TrackerConfig c;
  switch (id) {
    case TrackerId::kYin:
      c.window_length = 0.016;
      c.voicing_threshold = 0.10;
      break;
    case TrackerId::kAcf:
      c.window_length = 0.040;
      c.voicing_threshold = 0.45;
      break;
    case TrackerId::kNccf:
      c.window_length = 0.040;
      c.voicing_threshold = 0.50;
      break;
    case TrackerId::kSrh:
      c.window_length = 0.100;
      c.voicing_threshold = 0.07;
      break;
    case TrackerId::kSsh:
      c.window_length = 0.100;
      c.voicing_threshold = 0.07;
      break;
  }
  return c;
}

inline TrackerConfig optimized_config(TrackerId id) {
  TrackerConfig c = default_config(id);
  switch (id) {
    case TrackerId::kYin:
      c.window_length = 0.010;
      break;
    case TrackerId::kAcf:
      c.voicing_threshold = 0.25;
      break;
    case TrackerId::kNccf:
      break;
    case TrackerId::kSrh:
      c.window_length = 0.125;
      c.voicing_threshold = 0.065;
      break;
    case TrackerId::kSsh:
      c.window_length = 0.100;
      c.voicing_threshold = 0.095;
      break;
  }
  return c;
}

// Throws DomainError on an unusable configuration; warns when the ACF
// window cannot hold two periods of f0_min. The NCCF correlates past the
// end of its window, so it has no such limit.
inline void check_config(TrackerId id, const TrackerConfig& c, int sample_rate) {
  if (!(c.f0_min > 0.0 && c.f0_min < c.f0_max)) {
    throw DomainError(fmt::format("{}: need 0 < f0_min < f0_max (got {}, {})",
                                  tracker_name(id), c.f0_min, c.f0_max));
  }
  if (!(c.f0_max < sample_rate / 2.0)) {
    throw DomainError(fmt::format("{}: f0_max {} Hz must be below Nyquist ({} Hz)",
                                  tracker_name(id), c.f0_max, sample_rate / 2.0));
  }
  if (!(c.hop > 0.0)) throw DomainError("tracker hop must be positive");
  if (!(c.window_length > 0.0)) {
    throw DomainError("tracker window length must be positive");
  }
  if (c.n_harmonics < 1) throw DomainError("n_harmonics must be >= 1");
  if (!(c.grid_step_cents > 0.0)) throw DomainError("grid step must be positive");
  if (c.n_candidates < 1) throw DomainError("n_candidates must be >= 1");
  if (id == TrackerId::kAcf && c.window_length * c.f0_min < 2.0) {
    warn(fmt::format("{}: window of {} s holds fewer than two periods of {} Hz",
                     tracker_name(id), c.window_length, c.f0_min));
  }
}

namespace detail {

struct LagRange {
  std::size_t min = 0;
  std::size_t max = 0;
};

inline LagRange lag_range(const TrackerConfig& c, int sample_rate) {
  LagRange r;
  r.min = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(sample_rate / c.f0_max)));
  r.max = static_cast<std::size_t>(std::ceil(sample_rate / c.f0_min));
  return r;
}

inline double clamp_f0(double f0, const TrackerConfig& c) {
  return std::clamp(f0, c.f0_min, c.f0_max);
}

inline std::int64_t frame_center(std::size_t k, double hop, int sample_rate) {
  return time_to_sample(static_cast<double>(k) * hop, sample_rate);
}

// --- yin ------------------------------------------------------------------

struct YinPick {
  bool voiced = false;
  double period = 0.0;  // samples
  double aperiodicity = 1.0;
};

inline YinPick yin_pick(std::span<const double> samples, std::int64_t start,
                        std::size_t window, const LagRange& lags,
                        double threshold) {
  const std::size_t lag_max = lags.max + 1;
  const auto seg = extract_segment(samples, start, window + lag_max);
  const auto lp = lagged_products(seg, lag_max);
  if (!(lp.energy[0] > 0.0)) return {};
  std::vector<double> d(lag_max + 1, 0.0);
  for (std::size_t tau = 1; tau <= lag_max; ++tau) {
    d[tau] = std::max(lp.energy[0] + lp.energy[tau] - 2.0 * lp.cross[tau], 0.0);
  }
  const auto dn = cumulative_mean_normalize(d);
  for (std::size_t tau = lags.min; tau <= lags.max; ++tau) {
    if (dn[tau] < threshold) {
      while (tau + 1 <= lags.max && dn[tau + 1] < dn[tau]) ++tau;
      const auto pk = parabolic_peak(dn[tau - 1], dn[tau], dn[tau + 1]);
      YinPick p;
      p.voiced = true;
      p.period = static_cast<double>(tau) + pk.offset;
      p.aperiodicity = std::clamp(pk.value, 0.0, 1.0);
      return p;
    }
  }
  return {};
}

// --- spectral harmonic summation -------------------------------------------

// Linear interpolation of a one-sided magnitude spectrum at fractional bin b.
inline double spectrum_at(std::span<const double> e, double b) {
  if (b < 0.0) return 0.0;
  const auto i = static_cast<std::size_t>(b);
  if (i + 1 >= e.size()) return i + 1 == e.size() ? e[i] : 0.0;
  const double frac = b - static_cast<double>(i);
  return e[i] + frac * (e[i + 1] - e[i]);
}

inline constexpr double kFineStepCents = 1.0;

inline PitchContour track_harmonic_summation(const Signal& signal,
                                             const TrackerConfig& cfg,
                                             int lpc_order) {
  const int sr = signal.sample_rate;
  const std::size_t n_frames = frame_count(signal.size(), sr, cfg.hop);
  const std::size_t length = odd_window_samples(cfg.window_length, sr);
  // One-hertz bins: F0 grid frequencies map directly onto bin positions.
  const auto n_bins = static_cast<std::size_t>(sr);
  if (n_bins < length) {
    throw DomainError("harmonic summation: window longer than one second");
  }
  const double bin_per_hz = static_cast<double>(n_bins) / sr;
  const auto blackman = make_window(WindowType::kBlackman, length);
  const auto hann = make_window(WindowType::kHann, length);

  const std::size_t n_grid =
      static_cast<std::size_t>(std::floor(1200.0 * std::log2(cfg.f0_max / cfg.f0_min) /
                                          cfg.grid_step_cents)) + 1;
  std::vector<double> grid(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    grid[i] = cfg.f0_min * std::exp2(static_cast<double>(i) * cfg.grid_step_cents / 1200.0);
  }

  PitchContour out;
  out.hop = cfg.hop;
  out.frames.resize(n_frames);
  const auto order = static_cast<std::size_t>(std::max(lpc_order, 0));
  std::vector<double> score(n_grid);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const std::int64_t center = frame_center(k, cfg.hop, sr);
    const std::int64_t start = center - static_cast<std::int64_t>(length / 2);
    std::vector<double> frame;
    if (order == 0) {
      frame = extract_segment(signal.samples, start, length);
    } else {
      // `order` samples of history so the inverse filter starts settled.
      const auto ext = extract_segment(signal.samples,
                                       start - static_cast<std::int64_t>(order),
                                       length + order);
      std::vector<double> analysis(length);
      for (std::size_t i = 0; i < length; ++i) analysis[i] = ext[i + order] * hann[i];
      const auto lpc = lpc_coefficients(analysis, lpc_order);
      if (lpc.degenerate || lpc.a.size() == 1) {
        frame.assign(ext.begin() + static_cast<std::ptrdiff_t>(order), ext.end());
      } else {
        const auto res = inverse_filter(ext, lpc.a);
        frame.assign(res.begin() + static_cast<std::ptrdiff_t>(order), res.end());
      }
    }
    auto e = amplitude_spectrum(frame, n_bins, std::span<const double>(blackman));
    const double norm = std::sqrt(energy(e));
    if (!(norm > 0.0)) continue;
    for (double& v : e) v /= norm;

    auto score_at = [&](double f) {
      double s = spectrum_at(e, f * bin_per_hz);
      for (int h = 2; h <= cfg.n_harmonics; ++h) {
        s += spectrum_at(e, h * f * bin_per_hz) -
             spectrum_at(e, (h - 0.5) * f * bin_per_hz);
      }
      return s;
    };
    for (std::size_t i = 0; i < n_grid; ++i) score[i] = score_at(grid[i]);
    const auto best = static_cast<std::size_t>(
        std::max_element(score.begin(), score.end()) - score.begin());
    // The coarse peak can be narrower than the grid step at high F0 and
    // long windows, so search one step either side on a one-cent grid.
    const double lo_c = best > 0 ? -cfg.grid_step_cents : 0.0;
    const double hi_c = best + 1 < n_grid ? cfg.grid_step_cents : 0.0;
    const int n_fine = static_cast<int>(std::floor((hi_c - lo_c) / kFineStepCents + 1e-9)) + 1;
    std::vector<double> fine(static_cast<std::size_t>(n_fine));
    for (int j = 0; j < n_fine; ++j) {
      fine[static_cast<std::size_t>(j)] =
          score_at(grid[best] * std::exp2((lo_c + j * kFineStepCents) / 1200.0));
    }
    const auto fb = static_cast<std::size_t>(
        std::max_element(fine.begin(), fine.end()) - fine.begin());
    double cents = lo_c + static_cast<double>(fb) * kFineStepCents;
    double value = fine[fb];
    if (fb > 0 && fb + 1 < fine.size()) {
      const auto pk = parabolic_peak(fine[fb - 1], fine[fb], fine[fb + 1]);
      cents += pk.offset * kFineStepCents;
      value = pk.value;
    }
    const double pos = static_cast<double>(best) + cents / cfg.grid_step_cents;
    if (value >= cfg.voicing_threshold) {
      const double f0 = cfg.f0_min * std::exp2(pos * cfg.grid_step_cents / 1200.0);
      out.frames[k] = PitchFrame::voiced_at(clamp_f0(f0, cfg), value);
    }
  }
  return out;
}

// --- nccf -------------------------------------------------------------------

// NCCF at one lag for the reference window [start, start + window).
inline double nccf_at(std::span<const double> samples, std::int64_t start,
                      std::size_t window, std::size_t lag) {
  const auto seg = extract_segment(samples, start, window + lag);
  double cross = 0.0, e0 = 0.0, e1 = 0.0;
  for (std::size_t n = 0; n < window; ++n) {
    cross += seg[n] * seg[n + lag];
    e0 += seg[n] * seg[n];
    e1 += seg[n + lag] * seg[n + lag];
  }
  if (!(e0 > 0.0 && e1 > 0.0)) return 0.0;
  return std::clamp(cross / std::sqrt(e0 * e1), -1.0, 1.0);
}

struct NccfCandidate {
  double lag = 0.0;  // samples, interpolated
  double value = 0.0;
  double cost = 0.0;
};

}  // namespace detail

inline PitchContour track_yin(const Signal& signal, const TrackerConfig& cfg) {
  validate(signal);
  if (signal.empty()) throw DomainError("track_yin: empty signal");
  check_config(TrackerId::kYin, cfg, signal.sample_rate);
  const int sr = signal.sample_rate;
  const auto lags = detail::lag_range(cfg, sr);
  const std::size_t window =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(cfg.window_length * sr)));
  const std::size_t n_frames = frame_count(signal.size(), sr, cfg.hop);

  PitchContour out;
  out.hop = cfg.hop;
  out.frames.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const std::int64_t center = detail::frame_center(k, cfg.hop, sr);
    // First pass spans the longest lag; the second re-centers the compared
    // span on the frame for the lag actually found.
    auto pick = detail::yin_pick(
        signal.samples, center - static_cast<std::int64_t>((window + lags.max) / 2),
        window, lags, cfg.voicing_threshold);
    if (!pick.voiced) continue;
    const auto span = static_cast<std::int64_t>(window) + std::llround(pick.period);
    const auto refined = detail::yin_pick(signal.samples, center - span / 2, window,
                                          lags, cfg.voicing_threshold);
    if (refined.voiced) pick = refined;
    out.frames[k] = PitchFrame::voiced_at(
        detail::clamp_f0(sr / pick.period, cfg), 1.0 - pick.aperiodicity);
  }
  return out;
}

inline PitchContour track_acf(const Signal& signal, const TrackerConfig& cfg) {
  validate(signal);
  if (signal.empty()) throw DomainError("track_acf: empty signal");
  check_config(TrackerId::kAcf, cfg, signal.sample_rate);
  const int sr = signal.sample_rate;
  const std::size_t length = odd_window_samples(cfg.window_length, sr);
  const auto window = make_window(WindowType::kHann, length);
  auto rw = autocorrelation(window);
  for (std::size_t i = rw.size(); i-- > 0;) rw[i] /= rw[0];

  auto lags = detail::lag_range(cfg, sr);
  // The window correction is unreliable past half the window.
  lags.max = std::min(lags.max, length / 2 - 1);
  const std::size_t n_frames = frame_count(signal.size(), sr, cfg.hop);
  const double global_peak = peak_abs(signal.samples);

  PitchContour out;
  out.hop = cfg.hop;
  out.frames.resize(n_frames);
  if (!(global_peak > 0.0) || lags.max <= lags.min) return out;

  for (std::size_t k = 0; k < n_frames; ++k) {
    auto seg = extract_centered(signal.samples, detail::frame_center(k, cfg.hop, sr),
                                length);
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(length);
    for (double& v : seg) v -= mean;
    const double local_peak = peak_abs(seg);
    for (std::size_t i = 0; i < length; ++i) seg[i] *= window[i];
    const auto ra = autocorrelation(seg);
    if (!(ra[0] > 0.0)) continue;

    auto r = [&](std::size_t tau) { return ra[tau] / ra[0] / rw[tau]; };
    double best_strength = -std::numeric_limits<double>::infinity();
    double best_lag = 0.0, best_value = 0.0;
    for (std::size_t tau = lags.min; tau <= lags.max; ++tau) {
      const double y0 = r(tau);
      if (!(y0 > r(tau - 1) && y0 >= r(tau + 1)) || y0 <= 0.0) continue;
      const auto pk = parabolic_peak(r(tau - 1), y0, r(tau + 1));
      const double lag = static_cast<double>(tau) + pk.offset;
      const double strength =
          pk.value - cfg.octave_cost * std::log2(cfg.f0_min * lag / sr);
      if (strength > best_strength) {
        best_strength = strength;
        best_lag = lag;
        best_value = pk.value;
      }
    }
    if (best_lag <= 0.0) continue;
    const double thr = cfg.voicing_threshold;
    const double unvoiced_strength =
        thr + std::max(0.0, 2.0 - (local_peak / global_peak) /
                                      (cfg.silence_threshold / (1.0 + thr)));
    if (best_value >= unvoiced_strength) {
      out.frames[k] = PitchFrame::voiced_at(detail::clamp_f0(sr / best_lag, cfg),
                                            std::min(best_value, 1.0));
    }
  }
  return out;
}

namespace detail {
inline constexpr int kMaxRefineSteps = 16;
}  // namespace detail

inline PitchContour track_nccf(const Signal& signal, const TrackerConfig& cfg) {
  validate(signal);
  if (signal.empty()) throw DomainError("track_nccf: empty signal");
  check_config(TrackerId::kNccf, cfg, signal.sample_rate);
  const int sr = signal.sample_rate;
  const auto lags = detail::lag_range(cfg, sr);
  const std::size_t lag_max = lags.max + 1;
  const std::size_t window =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(cfg.window_length * sr)));
  const std::size_t level_window = window | 1;
  const std::size_t n_frames = frame_count(signal.size(), sr, cfg.hop);
  const double global_peak = peak_abs(signal.samples);
  const double thr = cfg.voicing_threshold;

  PitchContour out;
  out.hop = cfg.hop;
  out.frames.resize(n_frames);
  if (!(global_peak > 0.0)) return out;

  // Per frame: voiced candidates followed by the unvoiced hypothesis.
  std::vector<std::vector<detail::NccfCandidate>> cands(n_frames);
  std::vector<double> unvoiced_cost(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const std::int64_t center = detail::frame_center(k, cfg.hop, sr);
    const auto seg = extract_segment(
        signal.samples, center - static_cast<std::int64_t>((window + lags.max) / 2),
        window + lag_max);
    const auto lp = lagged_products(seg, lag_max);
    std::vector<double> nccf(lag_max + 1, 0.0);
    if (lp.energy[0] > 0.0) {
      for (std::size_t tau = 1; tau <= lag_max; ++tau) {
        const double den = lp.energy[0] * lp.energy[tau];
        if (den > 0.0) nccf[tau] = std::clamp(lp.cross[tau] / std::sqrt(den), -1.0, 1.0);
      }
    }
    auto& fc = cands[k];
    double max_value = 0.0;
    for (std::size_t tau = lags.min; tau <= lags.max; ++tau) {
      const double y0 = nccf[tau];
      if (y0 <= 0.0 || !(y0 > nccf[tau - 1] && y0 >= nccf[tau + 1])) continue;
      const auto pk = parabolic_peak(nccf[tau - 1], y0, nccf[tau + 1]);
      detail::NccfCandidate c;
      c.lag = static_cast<double>(tau) + pk.offset;
      c.value = std::min(pk.value, 1.0);
      c.cost = 1.0 - c.value * (1.0 - cfg.lag_weight * c.lag / static_cast<double>(lags.max));
      max_value = std::max(max_value, c.value);
      fc.push_back(c);
    }
    std::sort(fc.begin(), fc.end(),
              [](const auto& a, const auto& b) { return a.cost < b.cost; });
    if (fc.size() > static_cast<std::size_t>(cfg.n_candidates)) {
      fc.resize(static_cast<std::size_t>(cfg.n_candidates));
    }
    const double local_peak =
        peak_abs(extract_centered(signal.samples, center, level_window));
    const double quiet = std::max(
        0.0, 2.0 - (local_peak / global_peak) / (cfg.silence_threshold / (1.0 + thr)));
    unvoiced_cost[k] = 1.0 - 2.0 * thr + max_value - quiet;
  }

  // Viterbi over (candidates..., unvoiced). Index fc.size() is unvoiced.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> acc(n_frames);
  std::vector<std::vector<std::size_t>> back(n_frames);
  auto log_f = [&](const detail::NccfCandidate& c) { return std::log2(sr / c.lag); };
  for (std::size_t k = 0; k < n_frames; ++k) {
    const auto& fc = cands[k];
    const std::size_t ns = fc.size() + 1;
    acc[k].assign(ns, kInf);
    back[k].assign(ns, 0);
    for (std::size_t j = 0; j < ns; ++j) {
      const bool j_voiced = j < fc.size();
      const double local = j_voiced ? fc[j].cost : unvoiced_cost[k];
      if (k == 0) {
        acc[k][j] = local;
        continue;
      }
      const auto& pc = cands[k - 1];
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i <= pc.size(); ++i) {
        const bool i_voiced = i < pc.size();
        double trans = 0.0;
        if (i_voiced && j_voiced) {
          trans = cfg.transition_cost * std::abs(log_f(fc[j]) - log_f(pc[i]));
        } else if (i_voiced != j_voiced) {
          trans = cfg.voicing_switch_cost;
        }
        const double v = acc[k - 1][i] + trans;
        if (v < best) {
          best = v;
          arg = i;
        }
      }
      acc[k][j] = best + local;
      back[k][j] = arg;
    }
  }
  if (n_frames == 0) return out;
  std::size_t state = static_cast<std::size_t>(
      std::min_element(acc.back().begin(), acc.back().end()) - acc.back().begin());
  for (std::size_t k = n_frames; k-- > 0;) {
    const auto& fc = cands[k];
    if (state < fc.size()) {
      const auto& c = fc[state];
      // Candidates were scored on a span centred for the longest lag.
      // Re-centre it for the chosen lag and climb to the nearest local
      // maximum of the re-centred NCCF before interpolating.
      const std::int64_t center = detail::frame_center(k, cfg.hop, sr);
      auto nccf_centered = [&](std::size_t tau) {
        const std::int64_t start = center - static_cast<std::int64_t>((window + tau) / 2);
        return detail::nccf_at(signal.samples, start, window, tau);
      };
      auto tau = static_cast<std::size_t>(std::lround(c.lag));
      tau = std::clamp(tau, lags.min, lags.max);
      double lag = c.lag;
      double value = c.value;
      double y0 = nccf_centered(tau);
      for (int step = 0; step < detail::kMaxRefineSteps; ++step) {
        const double up = tau < lags.max ? nccf_centered(tau + 1) : -2.0;
        const double down = tau > lags.min ? nccf_centered(tau - 1) : -2.0;
        if (up > y0 && up >= down) {
          ++tau;
          y0 = up;
        } else if (down > y0) {
          --tau;
          y0 = down;
        } else {
          break;
        }
      }
      if (tau > lags.min && tau < lags.max && y0 > 0.0) {
        const double ym1 = nccf_centered(tau - 1);
        const double yp1 = nccf_centered(tau + 1);
        if (y0 >= ym1 && y0 >= yp1) {
          const auto pk = parabolic_peak(ym1, y0, yp1);
          lag = static_cast<double>(tau) + pk.offset;
          value = std::min(pk.value, 1.0);
        }
      }
      out.frames[k] = PitchFrame::voiced_at(detail::clamp_f0(sr / lag, cfg),
                                            std::max(value, 0.0));
    }
    if (k > 0) state = back[k][state];
  }
  return out;
}

inline PitchContour track_srh(const Signal& signal, const TrackerConfig& cfg) {
  validate(signal);
  if (signal.empty()) throw DomainError("track_srh: empty signal");
  check_config(TrackerId::kSrh, cfg, signal.sample_rate);
  const int order = cfg.lpc_order < 0 ? default_lpc_order(signal.sample_rate)
                                      : cfg.lpc_order;
  return detail::track_harmonic_summation(signal, cfg, order);
}

inline PitchContour track_ssh(const Signal& signal, const TrackerConfig& cfg) {
  validate(signal);
  if (signal.empty()) throw DomainError("track_ssh: empty signal");
  check_config(TrackerId::kSsh, cfg, signal.sample_rate);
  return detail::track_harmonic_summation(signal, cfg, 0);
}

inline PitchContour track(TrackerId id, const Signal& signal,
                          const TrackerConfig& cfg) {
  switch (id) {
    case TrackerId::kYin: return track_yin(signal, cfg);
    case TrackerId::kAcf: return track_acf(signal, cfg);
    case TrackerId::kNccf: return track_nccf(signal, cfg);
    case TrackerId::kSrh: return track_srh(signal, cfg);
    case TrackerId::kSsh: return track_ssh(signal, cfg);
  }
  throw DomainError("unknown tracker");
}

}  // namespace pitchbench
