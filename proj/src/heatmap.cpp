// Copyright 2026 The mpa-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpa/heatmap.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mpa::heatmap {
namespace {

constexpr int kCell = 28;
constexpr int kLeft = 64;
constexpr int kTop = 56;

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

Rgb color(double value, double scale_max) {
  double t = scale_max > 0.0 ? value / scale_max : 0.0;
  if (!(t > 0.0)) t = 0.0;  // also maps NaN to the low end
  t = std::min(t, 1.0);
  auto mix = [t](int lo, int hi) {
    return static_cast<int>(std::lround(lo + (hi - lo) * t));
  };
  return {mix(kLow.r, kHigh.r), mix(kLow.g, kHigh.g), mix(kLow.b, kHigh.b)};
}

Files emit(const attn::HeatmapGrid& grid, double scale_max, std::string_view title) {
  if (!(scale_max > 0.0)) throw UsageError("heatmap: scale_max must be > 0");
  const auto& m = grid.mean;

  Files files;
  files.csv = "layer,head,mean,count\n";
  for (std::size_t l = 0; l < m.n_layers; ++l)
    for (std::size_t h = 0; h < m.n_heads; ++h)
      files.csv += fmt::format("{},{},{:.9f},{}\n", l, h, m.at(l, h), grid.count);

  const int width = kLeft + static_cast<int>(m.n_heads) * kCell + 16;
  const int height = kTop + static_cast<int>(m.n_layers) * kCell + 40;
  std::string& svg = files.svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height);
  svg += fmt::format("<title>{}</title>\n", xml_escape(title));
  svg += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"13\">{}</text>\n", kLeft,
                     xml_escape(title));
  svg += fmt::format("<text x=\"{}\" y=\"36\">head</text>\n", kLeft);
  svg += fmt::format("<text x=\"8\" y=\"{}\">layer</text>\n", kTop - 6);
  for (std::size_t h = 0; h < m.n_heads; ++h)
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + static_cast<int>(h) * kCell + kCell / 2, kTop - 6, h);
  for (std::size_t l = 0; l < m.n_layers; ++l) {
    const int y = kTop + static_cast<int>(l) * kCell;
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kLeft - 8,
                       y + kCell / 2 + 4, l);
    for (std::size_t h = 0; h < m.n_heads; ++h) {
      const double v = m.at(l, h);
      const Rgb c = color(v, scale_max);
      svg += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\">"
          "<title>layer {} head {}: {:.6f}</title></rect>\n",
          kLeft + static_cast<int>(h) * kCell, y, kCell, kCell, c.r, c.g, c.b, l, h, v);
    }
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\">n = {}, scale 0 to {:.6f}</text>\n", kLeft,
                     kTop + static_cast<int>(m.n_layers) * kCell + 24, grid.count, scale_max);
  svg += "</svg>\n";
  return files;
}

}  // namespace mpa::heatmap
