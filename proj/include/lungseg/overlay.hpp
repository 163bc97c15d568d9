// Copyright 2026 The lungseg Authors
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

#pragma once

#include <string>

#include "lungseg/image_io.hpp"
#include "lungseg/mask.hpp"

namespace lungseg {

inline constexpr Rgb kOverlayRed{255, 0, 0};
inline constexpr Rgb kAgreeColor{0, 255, 0};   // gt and prediction
inline constexpr Rgb kMissedColor{0, 0, 255};  // gt only
inline constexpr Rgb kExtraColor{255, 0, 0};   // prediction only

/// Parses "RRGGBB" (optionally prefixed by '#'). Throws ConfigError.
Rgb parse_color(const std::string& hex);

/// Background pixels copy the gray value; foreground pixels blend
/// (1 - alpha) * gray + alpha * color per channel, rounded half up.
RgbImage render_overlay(const GrayImage& image, const BinaryMask& mask, Rgb color, double alpha);

/// Ground truth vs prediction: agreement, missed and extra pixels get distinct colors.
RgbImage render_comparison(const GrayImage& image, const BinaryMask& gt, const BinaryMask& pred,
                           double alpha);

}  // namespace lungseg
