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

#include "lungseg/overlay.hpp"

#include <cctype>
#include <cmath>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

std::uint8_t blend(std::uint8_t gray, std::uint8_t color, double alpha) {
  const double v = (1.0 - alpha) * gray + alpha * color;
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("overlay alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

void check_dims(const GrayImage& image, const BinaryMask& m, const char* what) {
  if (image.height != m.height() || image.width != m.width()) {
    throw ContractError(std::string("overlay: image ") + std::to_string(image.height) + "x" +
                        std::to_string(image.width) + " vs " + what + " " + m.shape_string());
  }
}

Rgb blend(std::uint8_t gray, Rgb color, double alpha) {
  return {blend(gray, color[0], alpha), blend(gray, color[1], alpha), blend(gray, color[2], alpha)};
}

}  // namespace

Rgb parse_color(const std::string& hex) {
  std::string s = hex;
  if (!s.empty() && s.front() == '#') s.erase(0, 1);
  if (s.size() != 6 || !std::all_of(s.begin(), s.end(), [](unsigned char ch) {
        return std::isxdigit(ch) != 0;
      })) {
    throw ConfigError("color must be RRGGBB hex, got '" + hex + "'");
  }
  const auto v = std::stoul(s, nullptr, 16);
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>((v >> 8) & 0xFF),
          static_cast<std::uint8_t>(v & 0xFF)};
}

RgbImage render_overlay(const GrayImage& image, const BinaryMask& mask, Rgb color, double alpha) {
  check_alpha(alpha);
  check_dims(image, mask, "mask");
  RgbImage out(image.height, image.width);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const std::uint8_t g = image.at(y, x);
      out.set(y, x, mask.at(y, x) ? blend(g, color, alpha) : Rgb{g, g, g});
    }
  }
  return out;
}

RgbImage render_comparison(const GrayImage& image, const BinaryMask& gt, const BinaryMask& pred,
                           double alpha) {
  check_alpha(alpha);
  check_dims(image, gt, "ground truth");
  check_dims(image, pred, "prediction");
  RgbImage out(image.height, image.width);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const std::uint8_t g = image.at(y, x);
      const bool a = gt.at(y, x), b = pred.at(y, x);
      if (a && b) {
        out.set(y, x, blend(g, kAgreeColor, alpha));
      } else if (a) {
        out.set(y, x, blend(g, kMissedColor, alpha));
      } else if (b) {
        out.set(y, x, blend(g, kExtraColor, alpha));
      } else {
        out.set(y, x, {g, g, g});
      }
    }
  }
  return out;
}

}  // namespace lungseg
