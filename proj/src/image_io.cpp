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

#include "lungseg/image_io.hpp"

#include <png.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

struct PngImage {
  png_image img{};
  PngImage() { img.version = PNG_IMAGE_VERSION; }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

// Decodes `path` to 8-bit pixels: RGB when `force_rgb` or the source has color, gray otherwise.
// `is_color` reports the source.
std::vector<std::uint8_t> decode(const std::filesystem::path& path, bool force_rgb,
                                 std::size_t& height, std::size_t& width, bool& is_color) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw FileNotFoundError("image file not found: " + path.string());
  }
  PngImage png;
  if (!png_image_begin_read_from_file(&png.img, path.c_str())) {
    throw DecodeError("cannot decode " + path.string() + ": " + png.img.message);
  }
  is_color = (png.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.img.format = force_rgb || is_color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  height = png.img.height;
  width = png.img.width;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.img));
  png_color black{0, 0, 0};
  if (!png_image_finish_read(&png.img, &black, buf.data(), 0, nullptr)) {
    throw DecodeError("cannot decode " + path.string() + ": " + png.img.message);
  }
  if (height == 0 || width == 0) throw DecodeError("empty image: " + path.string());
  return buf;
}

void encode(const std::filesystem::path& path, png_uint_32 format, std::size_t height,
            std::size_t width, const std::vector<std::uint8_t>& pixels) {
  PngImage png;
  png.img.width = static_cast<png_uint_32>(width);
  png.img.height = static_cast<png_uint_32>(height);
  png.img.format = format;
  if (!png_image_write_to_file(&png.img, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + png.img.message);
  }
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
  std::size_t h = 0, w = 0;
  bool color = false;
  // Color sources are decoded as RGB so unequal channels are rejected rather than
  // luminance-converted.
  auto buf = decode(path, false, h, w, color);
  if (!color) {
    GrayImage out;
    out.height = h;
    out.width = w;
    out.pixels = std::move(buf);
    return out;
  }
  GrayImage out(h, w);
  for (std::size_t i = 0; i < h * w; ++i) {
    const std::uint8_t r = buf[3 * i], g = buf[3 * i + 1], b = buf[3 * i + 2];
    if (r != g || g != b) {
      throw ColorImageError(path.string() + " is a color image with unequal channels");
    }
    out.pixels[i] = r;
  }
  return out;
}

RgbImage read_rgb(const std::filesystem::path& path) {
  RgbImage out;
  bool color = false;
  out.pixels = decode(path, true, out.height, out.width, color);
  return out;
}

void write_gray(const GrayImage& img, const std::filesystem::path& path) {
  encode(path, PNG_FORMAT_GRAY, img.height, img.width, img.pixels);
}

void write_rgb(const RgbImage& img, const std::filesystem::path& path) {
  encode(path, PNG_FORMAT_RGB, img.height, img.width, img.pixels);
}

BinaryMask mask_from_gray(const GrayImage& img, std::uint8_t threshold) {
  std::vector<std::uint8_t> bits(img.pixels.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = img.pixels[i] >= threshold ? 1 : 0;
  return BinaryMask(img.height, img.width, std::move(bits));
}

GrayImage mask_to_gray(const BinaryMask& m) {
  GrayImage g(m.height(), m.width());
  for (std::size_t i = 0; i < m.size(); ++i) g.pixels[i] = m[i] ? 255 : 0;
  return g;
}

BinaryMask read_mask(const std::filesystem::path& path, std::uint8_t threshold) {
  return mask_from_gray(read_gray(path), threshold);
}

void write_mask(const BinaryMask& m, const std::filesystem::path& path) {
  write_gray(mask_to_gray(m), path);
}

Tensor gray_to_tensor(const GrayImage& img) {
  Tensor t(1, img.height, img.width);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) t.data()[i] = img.pixels[i] / 255.0;
  return t;
}

Tensor rgb_to_tensor(const RgbImage& img) {
  Tensor t(3, img.height, img.width);
  const std::size_t n = img.height * img.width;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) t.plane(c)[i] = img.pixels[3 * i + c] / 255.0;
  }
  return t;
}

void write_npy(const Tensor& t, const std::filesystem::path& path) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                       std::to_string(t.channels()) + ", " + std::to_string(t.height()) + ", " +
                       std::to_string(t.width()) + "), }";
  // Magic + version + u16 length + header, padded with spaces to a multiple of 64, '\n' last.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_le[2] = {static_cast<char>(len & 0xFF), static_cast<char>(len >> 8)};
  f.write(len_le, 2);
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : t.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    const char b[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                       static_cast<char>((bits >> 16) & 0xFF), static_cast<char>(bits >> 24)};
    f.write(b, 4);
  }
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace lungseg
