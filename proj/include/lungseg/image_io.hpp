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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lungseg/mask.hpp"
#include "lungseg/tensor.hpp"

namespace lungseg {

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w, std::uint8_t fill = 0)
      : height(h), width(w), pixels(h * w, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(std::size_t h, std::size_t w) : height(h), width(w), pixels(h * w * 3, 0) {}

  Rgb at(std::size_t y, std::size_t x) const {
    const std::size_t i = (y * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(std::size_t y, std::size_t x, Rgb c) {
    const std::size_t i = (y * width + x) * 3;
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

inline constexpr std::uint8_t kDefaultMaskThreshold = 128;

// PNG codec. Errors: FileNotFoundError (missing), DecodeError (not a decodable image),
// ColorImageError (color image with unequal channels where gray is required), IoError (writes).

/// Reads a grayscale PNG. RGB input is accepted only when R == G == B at every pixel.
GrayImage read_gray(const std::filesystem::path& path);
RgbImage read_rgb(const std::filesystem::path& path);
void write_gray(const GrayImage& img, const std::filesystem::path& path);
void write_rgb(const RgbImage& img, const std::filesystem::path& path);

/// Foreground where intensity >= threshold.
BinaryMask read_mask(const std::filesystem::path& path,
                     std::uint8_t threshold = kDefaultMaskThreshold);
/// Lossless 8-bit grayscale PNG, foreground 255, background 0.
void write_mask(const BinaryMask& m, const std::filesystem::path& path);

BinaryMask mask_from_gray(const GrayImage& img, std::uint8_t threshold = kDefaultMaskThreshold);
GrayImage mask_to_gray(const BinaryMask& m);

/// 1 x H x W tensor with intensities scaled to [0, 1].
Tensor gray_to_tensor(const GrayImage& img);
/// 3 x H x W tensor with intensities scaled to [0, 1].
Tensor rgb_to_tensor(const RgbImage& img);

/// Writes a tensor as a little-endian float32 NumPy .npy array of shape (C, H, W).
void write_npy(const Tensor& t, const std::filesystem::path& path);

}  // namespace lungseg
