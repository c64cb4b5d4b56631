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

// Shoebox room impulse responses by the image-source method, decay-time
// measurement by Schroeder backward integration, and convolution.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <fmt/format.h>

#include "pitchbench/error.hpp"
#include "pitchbench/fft.hpp"
#include "pitchbench/signal.hpp"
#include "pitchbench/wav.hpp"

namespace pitchbench {

using Vec3 = std::array<double, 3>;

// How the wall absorption is derived from the requested T60.
//   kSabine: alpha = 0.161 V / (S T60); infeasible when alpha >= 1.
//   kEyring: alpha = 1 - exp(-0.161 V / (S T60)); always feasible.
//   kCalibrated: starts from Eyring and rescales the absorption exponent
//     until the Schroeder T60 of the simulated response matches.
enum class AbsorptionModel { kCalibrated, kEyring, kSabine };

struct RoomSpec {
  Vec3 dimensions{3.0, 4.0, 5.0};
  Vec3 source_position{1.0, 1.5, 1.5};
  Vec3 mic_position{2.0, 2.5, 1.5};
  double t60 = 0.3;
  double speed_of_sound = 343.0;
  // Highest reflection count per image; negative means "until the RIR
  // length is filled".
  int max_order = -1;
  AbsorptionModel absorption = AbsorptionModel::kCalibrated;
};

struct RoomImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 0;
  std::size_t direct_delay = 0;  // samples
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double room_volume(const RoomSpec& r) {
  return r.dimensions[0] * r.dimensions[1] * r.dimensions[2];
}

inline double room_surface(const RoomSpec& r) {
  const auto& d = r.dimensions;
  return 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
}

// Shortest T60 the Sabine relation can express for this room.
inline double sabine_min_t60(const RoomSpec& r) {
  return 0.161 * room_volume(r) / room_surface(r);
}

inline void validate(const RoomSpec& r) {
  for (int i = 0; i < 3; ++i) {
    if (!(r.dimensions[i] > 0.0)) throw DomainError("room: dimensions must be positive");
    for (const Vec3* p : {&r.source_position, &r.mic_position}) {
      if (!((*p)[i] > 0.0 && (*p)[i] < r.dimensions[i])) {
        throw DomainError("room: source and mic must be strictly inside the room");
      }
    }
  }
  if (distance(r.source_position, r.mic_position) <= 0.0) {
    throw DomainError("room: source and mic coincide");
  }
  if (!(r.t60 >= 0.0)) throw DomainError("room: t60 must be non-negative");
  if (!(r.speed_of_sound > 0.0)) throw DomainError("room: speed of sound must be positive");
}

// Uniform wall absorption coefficient for the requested T60.
inline double wall_absorption(const RoomSpec& r) {
  const double x = 0.161 * room_volume(r) / (room_surface(r) * r.t60);
  if (r.absorption != AbsorptionModel::kSabine) return 1.0 - std::exp(-x);
  if (x >= 1.0) {
    const double min_t60 = sabine_min_t60(r);
    throw InfeasibleRoomError(
        fmt::format("room: T60 of {} s is too short for a {}x{}x{} m room "
                    "(Sabine minimum {:.4f} s)",
                    r.t60, r.dimensions[0], r.dimensions[1], r.dimensions[2], min_t60),
        min_t60);
  }
  return x;
}

inline std::size_t delay_samples(double metres, double speed_of_sound, int sample_rate) {
  // Nearest sample, halves rounded up; the epsilon absorbs decimal noise
  // in inputs such as 1.715 m.
  return static_cast<std::size_t>(
      std::floor(metres * sample_rate / speed_of_sound + 0.5 + 1e-9));
}

namespace detail {

inline RoomImpulseResponse image_sum(const RoomSpec& room, int sample_rate, double beta) {
  RoomImpulseResponse rir;
  rir.sample_rate = sample_rate;
  const auto length =
      static_cast<std::size_t>(std::ceil(1.2 * room.t60 * sample_rate - 1e-9));
  const double direct = distance(room.source_position, room.mic_position);
  rir.direct_delay = delay_samples(direct, room.speed_of_sound, sample_rate);
  rir.taps.assign(std::max(length, rir.direct_delay + 1), 0.0);
  const double max_dist =
      static_cast<double>(rir.taps.size()) / sample_rate * room.speed_of_sound;

  // Along each axis the images sit at 2nL + s (2|n| reflections) and
  // 2nL - s (|2n - 1| reflections).
  struct AxisImage {
    double offset;  // image coordinate minus mic coordinate
    int reflections;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    const double len = room.dimensions[a];
    const double s = room.source_position[a], m = room.mic_position[a];
    const int n_max = static_cast<int>(std::ceil(max_dist / (2.0 * len))) + 1;
    for (int n = -n_max; n <= n_max; ++n) {
      for (int q = 0; q < 2; ++q) {
        const double x = 2.0 * n * len + (q == 0 ? s : -s);
        const int refl = q == 0 ? 2 * std::abs(n) : std::abs(2 * n - 1);
        if (std::abs(x - m) > max_dist) continue;
        if (room.max_order >= 0 && refl > room.max_order) continue;
        axes[a].push_back({x - m, refl});
      }
    }
  }
  for (const auto& ix : axes[0]) {
    for (const auto& iy : axes[1]) {
      const double dxy2 = ix.offset * ix.offset + iy.offset * iy.offset;
      if (dxy2 > max_dist * max_dist) continue;
      for (const auto& iz : axes[2]) {
        const int refl = ix.reflections + iy.reflections + iz.reflections;
        if (room.max_order >= 0 && refl > room.max_order) continue;
        const double d = std::sqrt(dxy2 + iz.offset * iz.offset);
        const std::size_t k = delay_samples(d, room.speed_of_sound, sample_rate);
        if (k >= rir.taps.size()) continue;
        rir.taps[k] += std::pow(beta, refl) / d;
      }
    }
  }
  return rir;
}

}  // namespace detail

inline double schroeder_t60(std::span<const double> taps, int sample_rate,
                            double upper_db = -5.0, double lower_db = -35.0);

inline RoomImpulseResponse simulate_rir(const RoomSpec& room, int sample_rate) {
  validate(room);
  if (sample_rate <= 0) throw DomainError("rir: sample rate must be positive");
  if (!(room.t60 > 0.0)) throw DomainError("rir: t60 must be positive");
  const double alpha = wall_absorption(room);
  if (room.absorption != AbsorptionModel::kCalibrated) {
    return detail::image_sum(room, sample_rate, std::sqrt(std::max(0.0, 1.0 - alpha)));
  }
  // Decay time is close to inversely proportional to -ln(beta), so a few
  // multiplicative corrections converge.
  double exponent = -std::log(1.0 - alpha);
  auto rir = detail::image_sum(room, sample_rate, std::exp(-0.5 * exponent));
  for (int it = 0; it < 8; ++it) {
    const double measured = schroeder_t60(rir.taps, sample_rate);
    if (!std::isfinite(measured)) break;
    const double ratio = measured / room.t60;
    if (std::abs(ratio - 1.0) < 0.005) break;
    exponent *= ratio;
    rir = detail::image_sum(room, sample_rate, std::exp(-0.5 * exponent));
  }
  return rir;
}

// T60 from the Schroeder energy decay curve: a least-squares line through
// the [-5, -35] dB span, extrapolated to -60 dB. Returns NaN when the
// decay never reaches -35 dB.
inline double schroeder_t60(std::span<const double> taps, int sample_rate,
                            double upper_db, double lower_db) {
  std::vector<double> edc(taps.size() + 1, 0.0);
  for (std::size_t n = taps.size(); n-- > 0;) edc[n] = edc[n + 1] + taps[n] * taps[n];
  if (!(edc[0] > 0.0)) return std::nan("");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  bool reached = false;
  for (std::size_t n = 0; n < taps.size(); ++n) {
    if (!(edc[n] > 0.0)) break;
    const double db = 10.0 * std::log10(edc[n] / edc[0]);
    if (db > upper_db) continue;
    if (db < lower_db) {
      reached = true;
      break;
    }
    const double t = static_cast<double>(n) / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (!reached || count < 2) return std::nan("");
  const double c = static_cast<double>(count);
  const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  if (!(slope < 0.0)) return std::nan("");
  return -60.0 / slope;
}

inline double schroeder_t60(const RoomImpulseResponse& rir) {
  return schroeder_t60(rir.taps, rir.sample_rate);
}

// Full linear convolution truncated to the input length, rescaled to the
// input's peak amplitude.
inline Signal convolve(const Signal& signal, const RoomImpulseResponse& rir) {
  if (signal.sample_rate != rir.sample_rate) {
    throw DomainError(fmt::format("convolve: sample rate {} does not match RIR rate {}",
                                  signal.sample_rate, rir.sample_rate));
  }
  Signal out{std::vector<double>(signal.size(), 0.0), signal.sample_rate};
  if (signal.empty() || rir.taps.empty()) return out;
  const std::size_t n = fft::next_pow2(signal.size() + rir.taps.size() - 1);
  auto a = fft::rfft(signal.samples, n);
  const auto b = fft::rfft(rir.taps, n);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  const auto y = fft::irfft(std::move(a), n);
  std::copy_n(y.begin(), signal.size(), out.samples.begin());
  const double in_peak = peak_abs(signal.samples);
  const double out_peak = peak_abs(out.samples);
  if (out_peak > 0.0) {
    for (double& v : out.samples) v *= in_peak / out_peak;
  }
  return out;
}

// Drops the propagation delay so that the direct sound lands on tap 0 and
// reverberant audio stays aligned with the dry signal's frame grid.
inline RoomImpulseResponse align_to_direct(const RoomImpulseResponse& rir) {
  RoomImpulseResponse out = rir;
  const auto d = std::min(rir.direct_delay, rir.taps.size());
  out.taps.erase(out.taps.begin(), out.taps.begin() + static_cast<std::ptrdiff_t>(d));
  out.direct_delay = 0;
  return out;
}

inline void save_rir(const std::filesystem::path& path, const RoomImpulseResponse& rir) {
  save_audio(path, Signal{rir.taps, rir.sample_rate}, SampleFormat::kFloat32);
}

}  // namespace pitchbench
