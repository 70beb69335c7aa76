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

#ifndef MPA_HEATMAP_HPP_
#define MPA_HEATMAP_HPP_

#include <string>
#include <string_view>

#include "mpa/attn.hpp"

namespace mpa::heatmap {

struct Rgb {
  int r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kLow{247, 251, 255};
inline constexpr Rgb kHigh{8, 48, 107};

/// Linear blend from kLow at 0 to kHigh at scale_max, clamped.
Rgb color(double value, double scale_max);

struct Files {
  std::string csv;
  std::string svg;
};

/// CSV "layer,head,mean,count" in layer-major order and an SVG grid with one
/// row per layer and one column per head. Output depends only on the
/// arguments. Throws UsageError unless scale_max > 0.
Files emit(const attn::HeatmapGrid& grid, double scale_max, std::string_view title);

}  // namespace mpa::heatmap

#endif  // MPA_HEATMAP_HPP_
