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

// Minimal static SVG renderings: grouped bar charts and line charts.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace pitchbench {

struct PlotSeries {
  std::string label;
  std::vector<std::optional<double>> values;  // one per x position; nullopt = gap
};

struct PlotData {
  std::string title;
  std::string y_label;
  std::vector<std::string> x_labels;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                           "#bcbd22", "#17becf"};

inline const char* series_color(std::size_t i) {
  return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

// Smallest "nice" number (1, 2 or 5 times a power of ten) >= v.
inline double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * p >= v * (1.0 - 1e-12)) return m * p;
  }
  return 10.0 * p;
}

struct Frame {
  double width = 720, height = 420;
  double left = 70, right = 170, top = 40, bottom = 60;
  double y_max = 1.0;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double y(double v) const { return top + plot_h() * (1.0 - v / y_max); }
};

inline std::string open_chart(const PlotData& d, Frame& f) {
  double vmax = 0.0;
  for (const auto& s : d.series) {
    for (const auto& v : s.values) {
      if (v && std::isfinite(*v)) vmax = std::max(vmax, *v);
    }
  }
  f.y_max = nice_ceiling(vmax);
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      f.width, f.height, f.left + f.plot_w() / 2, xml_escape(d.title));
  for (int i = 0; i <= 5; ++i) {
    const double v = f.y_max * i / 5.0;
    const double y = f.y(v);
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.4g}</text>\n",
        f.left, y, f.left + f.plot_w(), f.left - 6, y + 4, v);
  }
  out += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<text x=\"18\" y=\"{4}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {4})\">{5}</text>\n",
      f.left, f.top, f.top + f.plot_h(), f.left + f.plot_w(), f.top + f.plot_h() / 2,
      xml_escape(d.y_label));
  for (std::size_t s = 0; s < d.series.size(); ++s) {
    const double y = f.top + 10 + 18.0 * s;
    const double x = f.left + f.plot_w() + 15;
    out += fmt::format(
        "<rect x=\"{0}\" y=\"{1}\" width=\"12\" height=\"12\" fill=\"{2}\"/>\n"
        "<text x=\"{3}\" y=\"{4}\">{5}</text>\n",
        x, y - 10, series_color(s), x + 18, y, xml_escape(d.series[s].label));
  }
  return out;
}

}  // namespace detail

// One cluster of bars per x label, one bar per series.
inline std::string render_bar_chart(const PlotData& d) {
  detail::Frame f;
  std::string out = detail::open_chart(d, f);
  const std::size_t nx = std::max<std::size_t>(d.x_labels.size(), 1);
  const std::size_t ns = std::max<std::size_t>(d.series.size(), 1);
  const double slot = f.plot_w() / nx;
  const double bar = slot * 0.8 / ns;
  for (std::size_t x = 0; x < d.x_labels.size(); ++x) {
    const double x0 = f.left + slot * x + slot * 0.1;
    for (std::size_t s = 0; s < d.series.size(); ++s) {
      const auto& vals = d.series[s].values;
      if (x >= vals.size() || !vals[x]) continue;
      const double y = f.y(*vals[x]);
      out += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
          "fill=\"{}\"/>\n",
          x0 + bar * s, y, bar, f.top + f.plot_h() - y, detail::series_color(s));
    }
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       f.left + slot * (x + 0.5), f.top + f.plot_h() + 18,
                       detail::xml_escape(d.x_labels[x]));
  }
  out += "</svg>\n";
  return out;
}

// One polyline per series over evenly spaced x labels.
inline std::string render_line_chart(const PlotData& d) {
  detail::Frame f;
  std::string out = detail::open_chart(d, f);
  const std::size_t nx = d.x_labels.size();
  const double step = nx > 1 ? f.plot_w() / (nx - 1) : 0.0;
  auto px = [&](std::size_t x) { return nx > 1 ? f.left + step * x : f.left + f.plot_w() / 2; };
  for (std::size_t x = 0; x < nx; ++x) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       px(x), f.top + f.plot_h() + 18, detail::xml_escape(d.x_labels[x]));
  }
  for (std::size_t s = 0; s < d.series.size(); ++s) {
    const auto& vals = d.series[s].values;
    std::string points;
    for (std::size_t x = 0; x < std::min(nx, vals.size()); ++x) {
      if (!vals[x]) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(x), f.y(*vals[x]));
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(x),
                         f.y(*vals[x]), detail::series_color(s));
    }
    if (!points.empty()) points.pop_back();
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" "
                       "stroke-width=\"2\"/>\n",
                       points, detail::series_color(s));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace pitchbench
