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


#include <gtest/gtest.h>

#include "mpa/heatmap.hpp"

namespace mpa::heatmap {
namespace {

attn::HeatmapGrid grid(std::size_t l, std::size_t h, std::vector<double> v, std::size_t n = 4) {
  attn::HeatmapGrid g;
  g.mean = attn::HeadMatrix(l, h);
  g.mean.values = std::move(v);
  g.count = n;
  return g;
}

TEST(Color, Endpoints) {
  EXPECT_EQ(color(0.0, 0.5), (Rgb{247, 251, 255}));
  EXPECT_EQ(color(0.5, 0.5), (Rgb{8, 48, 107}));
  EXPECT_EQ(color(2.0, 0.5), kHigh);
  EXPECT_EQ(color(-1.0, 0.5), kLow);
  EXPECT_EQ(color(0.25, 0.5), (Rgb{128, 150, 181}));
}

TEST(Color, MonotoneChannels) {
  Rgb prev = color(0.0, 1.0);
  for (int i = 1; i <= 100; ++i) {
    const Rgb c = color(i / 100.0, 1.0);
    EXPECT_LE(c.r, prev.r);
    EXPECT_LE(c.g, prev.g);
    EXPECT_LE(c.b, prev.b);
    prev = c;
  }
}

TEST(Emit, SingleCellEndpoints) {
  EXPECT_NE(emit(grid(1, 1, {0.0}), 0.3, "t").svg.find("fill=\"rgb(247,251,255)\""),
            std::string::npos);
  EXPECT_NE(emit(grid(1, 1, {0.3}), 0.3, "t").svg.find("fill=\"rgb(8,48,107)\""),
            std::string::npos);
}

TEST(Emit, Deterministic) {
  const auto g = grid(2, 3, {0.1, 0.2, 0.3, 0.05, 0.0, 0.4});
  const auto a = emit(g, 0.4, "all / self"), b = emit(g, 0.4, "all / self");
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.svg, b.svg);
}

TEST(Emit, CsvLayout) {
  EXPECT_EQ(emit(grid(2, 2, {0.1, 0.2, 0.3, 0.25}, 7), 1.0, "x").csv,
            "layer,head,mean,count\n"
            "0,0,0.100000000,7\n"
            "0,1,0.200000000,7\n"
            "1,0,0.300000000,7\n"
            "1,1,0.250000000,7\n");
}

TEST(Emit, SvgShape) {
  const auto svg = emit(grid(3, 4, std::vector<double>(12, 0.1)), 1.0, "a<b & \"c\"").svg;
  std::size_t rects = 0;
  for (std::size_t at = svg.find("<rect"); at != std::string::npos; at = svg.find("<rect", at + 1))
    ++rects;
  EXPECT_EQ(rects, 12u);
  EXPECT_NE(svg.find("a&lt;b &amp; &quot;c&quot;"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Emit, ScaleMustBePositive) {
  EXPECT_THROW(emit(grid(1, 1, {0.1}), 0.0, "t"), UsageError);
  EXPECT_THROW(emit(grid(1, 1, {0.1}), -1.0, "t"), UsageError);
}

}  // namespace
}  // namespace mpa::heatmap
