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

// Numeric kernels shared by the trackers: autocorrelation, lagged products,
// the cumulative-mean-normalized difference function, LPC analysis and
// amplitude spectra.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pitchbench/error.hpp"
#include "pitchbench/fft.hpp"
#include "pitchbench/signal.hpp"

namespace pitchbench {

// r[tau] = sum_n x[n] x[n + tau] for tau = 0 .. len - 1, computed by FFT with
// enough zero padding that no circular wrap occurs.
inline std::vector<double> autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t nfft = fft::next_pow2(2 * n);
  auto spec = fft::rfft(x, nfft);
  for (auto& c : spec) c = fft::Complex(std::norm(c), 0.0);
  auto r = fft::irfft(std::move(spec), nfft);
  r.resize(n);
  if (r[0] == 0.0) std::fill(r.begin(), r.end(), 0.0);
  return r;
}

// Cross terms of a lagged comparison over a fixed integration window.
// For tau in [0, max_lag]:
//   cross[tau]  = sum_{n < W} x[n] x[n + tau]
//   energy[tau] = sum_{n < W} x[n + tau]^2
// where W = x.size() - max_lag. energy[0] is the reference window energy.
struct LaggedProducts {
  std::vector<double> cross;
  std::vector<double> energy;
};

inline LaggedProducts lagged_products(std::span<const double> x,
                                      std::size_t max_lag) {
  if (x.size() <= max_lag) {
    throw DomainError("lagged_products: frame shorter than max_lag + 1");
  }
  const std::size_t w = x.size() - max_lag;
  LaggedProducts out;
  out.cross.assign(max_lag + 1, 0.0);
  out.energy.assign(max_lag + 1, 0.0);

  // Running energies are summed directly: FFT rounding would swamp the
  // energy of near-silent windows next to loud ones.
  double e = 0.0;
  for (std::size_t n = 0; n < w; ++n) e += x[n] * x[n];
  out.energy[0] = e;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    e += x[tau + w - 1] * x[tau + w - 1] - x[tau - 1] * x[tau - 1];
    out.energy[tau] = std::max(e, 0.0);
  }
  if (out.energy[0] == 0.0) return out;

  const std::size_t nfft = fft::next_pow2(x.size() + w);
  auto a = fft::rfft(x.first(w), nfft);
  auto b = fft::rfft(x, nfft);
  for (std::size_t k = 0; k < a.size(); ++k) b[k] *= std::conj(a[k]);
  auto r = fft::irfft(std::move(b), nfft);
  std::copy_n(r.begin(), max_lag + 1, out.cross.begin());
  return out;
}

// Cumulative-mean normalization of a raw difference function:
// d'[0] = 1, d'[tau] = d[tau] * tau / sum_{j=1..tau} d[j]. Where the running
// sum is zero (silence) the value is defined as 1.
inline std::vector<double> cumulative_mean_normalize(std::span<const double> d) {
  std::vector<double> out(d.size(), 1.0);
  double running = 0.0;
  for (std::size_t tau = 1; tau < d.size(); ++tau) {
    running += d[tau];
    out[tau] = running > 0.0 ? d[tau] * static_cast<double>(tau) / running : 1.0;
  }
  return out;
}

// Raw difference function d[tau] = sum_{n < W} (x[n] - x[n + tau])^2 for
// tau in [0, max_lag], with W = x.size() - max_lag.
inline std::vector<double> difference_function(std::span<const double> x,
                                               std::size_t max_lag) {
  const auto lp = lagged_products(x, max_lag);
  std::vector<double> d(max_lag + 1, 0.0);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    d[tau] = std::max(lp.energy[0] + lp.energy[tau] - 2.0 * lp.cross[tau], 0.0);
  }
  return d;
}

// Normalized difference over lags [0, max_lag].
inline std::vector<double> yin_difference(std::span<const double> frame,
                                          std::size_t max_lag) {
  return cumulative_mean_normalize(difference_function(frame, max_lag));
}

// Single-argument form: the first half of the frame is the integration
// window and lags run over [0, len / 2).
inline std::vector<double> yin_difference(std::span<const double> frame) {
  if (frame.size() < 2) throw DomainError("yin_difference: frame too short");
  const std::size_t max_lag = frame.size() / 2;
  auto d = yin_difference(frame, max_lag);
  d.resize(max_lag);
  return d;
}

// Vertex of the parabola through (-1, ym1), (0, y0), (1, yp1).
struct ParabolicPeak {
  double offset = 0.0;
  double value = 0.0;
};

inline ParabolicPeak parabolic_peak(double ym1, double y0, double yp1) {
  const double denom = ym1 - 2.0 * y0 + yp1;
  if (denom == 0.0) return {0.0, y0};
  double offset = 0.5 * (ym1 - yp1) / denom;
  offset = std::clamp(offset, -1.0, 1.0);
  return {offset, y0 - 0.25 * (ym1 - yp1) * offset};
}

// ---------------------------------------------------------------------------
// Linear prediction

// Default LPC order for a sample rate: 2 + kHz.
inline int default_lpc_order(int sample_rate) {
  return 2 + static_cast<int>(std::lround(sample_rate / 1000.0));
}

struct LpcCoefficients {
  // Inverse filter A(z) = a[0] + a[1] z^-1 + ... with a[0] = 1.
  std::vector<double> a{1.0};
  double prediction_error = 0.0;
  bool degenerate = false;
};

// Levinson-Durbin recursion on autocorrelation lags r[0..order].
inline LpcCoefficients levinson_durbin(std::span<const double> r, int order) {
  LpcCoefficients out;
  if (order < 0 || static_cast<std::size_t>(order) >= r.size()) {
    throw DomainError("levinson_durbin: order must be in [0, r.size())");
  }
  out.a.assign(static_cast<std::size_t>(order) + 1, 0.0);
  out.a[0] = 1.0;
  double err = r[0];
  if (!(err > 0.0)) {
    out.degenerate = order > 0;
    out.a.assign(1, 1.0);
    out.prediction_error = 0.0;
    return out;
  }
  std::vector<double> prev(out.a.size(), 0.0);
  for (int i = 1; i <= order; ++i) {
    double acc = r[static_cast<std::size_t>(i)];
    for (int j = 1; j < i; ++j) acc += out.a[j] * r[static_cast<std::size_t>(i - j)];
    const double k = -acc / err;
    prev = out.a;
    for (int j = 1; j < i; ++j) out.a[j] = prev[j] + k * prev[i - j];
    out.a[i] = k;
    err *= (1.0 - k * k);
    if (!(err > r[0] * 1e-14)) {
      out.degenerate = true;
      out.a.assign(1, 1.0);
      out.prediction_error = r[0];
      return out;
    }
  }
  out.prediction_error = err;
  return out;
}

inline LpcCoefficients lpc_coefficients(std::span<const double> frame,
                                        int order) {
  if (order < 0 || static_cast<std::size_t>(order) >= frame.size()) {
    throw DomainError("lpc: order must be smaller than the frame length");
  }
  if (order == 0) return {};
  auto r = autocorrelation(frame);
  return levinson_durbin(std::span<const double>(r).first(order + 1), order);
}

// FIR inverse filtering with zero initial state: e[n] = sum_k a[k] x[n-k].
inline std::vector<double> inverse_filter(std::span<const double> x,
                                          std::span<const double> a) {
  std::vector<double> e(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    const std::size_t kmax = std::min(a.size() - 1, n);
    for (std::size_t k = 0; k <= kmax; ++k) acc += a[k] * x[n - k];
    e[n] = acc;
  }
  return e;
}

// All-pole synthesis 1/A(z) with zero initial state; inverts inverse_filter.
inline std::vector<double> synthesis_filter(std::span<const double> e,
                                            std::span<const double> a) {
  std::vector<double> y(e.size(), 0.0);
  for (std::size_t n = 0; n < e.size(); ++n) {
    double acc = e[n];
    const std::size_t kmax = std::min(a.size() - 1, n);
    for (std::size_t k = 1; k <= kmax; ++k) acc -= a[k] * y[n - k];
    y[n] = acc / a[0];
  }
  return y;
}

struct LpcResidual {
  std::vector<double> residual;
  LpcCoefficients coefficients;
  bool degenerate = false;
};

// Residual of the frame under its own autocorrelation-method predictor.
// Degenerate input (no energy, singular normal equations) returns the frame
// unchanged with the flag set.
inline LpcResidual lpc_residual(std::span<const double> frame, int order) {
  LpcResidual out;
  out.coefficients = lpc_coefficients(frame, order);
  if (out.coefficients.degenerate || order == 0) {
    out.residual.assign(frame.begin(), frame.end());
    out.degenerate = out.coefficients.degenerate;
    return out;
  }
  out.residual = inverse_filter(frame, out.coefficients.a);
  return out;
}

// ---------------------------------------------------------------------------
// Spectra

// |DFT| of the windowed frame zero-padded to n_bins points. Returns the
// n_bins / 2 + 1 non-negative frequency bins; bin k is k * rate / n_bins Hz.
inline std::vector<double> amplitude_spectrum(std::span<const double> frame,
                                              std::size_t n_bins,
                                              std::span<const double> w) {
  if (n_bins < frame.size()) {
    throw DomainError("amplitude_spectrum: n_bins must be >= frame length");
  }
  if (w.size() != frame.size()) {
    throw DomainError("amplitude_spectrum: window length mismatch");
  }
  std::vector<double> xw(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) xw[i] = frame[i] * w[i];
  const auto spec = fft::rfft(xw, n_bins);
  std::vector<double> mag(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) mag[k] = std::abs(spec[k]);
  return mag;
}

inline std::vector<double> amplitude_spectrum(
    std::span<const double> frame, std::size_t n_bins,
    WindowType window = WindowType::kBlackman) {
  const auto w = make_window(window, frame.size());
  return amplitude_spectrum(frame, n_bins, std::span<const double>(w));
}

}  // namespace pitchbench
