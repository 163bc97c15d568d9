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

#include "lungseg/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "lungseg/components.hpp"
#include "lungseg/errors.hpp"
#include "rng.hpp"

namespace lungseg {

namespace {

struct Ellipse {
  double cx, cy, rx, ry;

  bool contains(double x, double y) const {
    const double u = (x - cx) / rx, v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  }
};

void paint(BinaryMask& m, const Ellipse& e) {
  for (std::size_t y = 0; y < m.height(); ++y) {
    for (std::size_t x = 0; x < m.width(); ++x) {
      if (e.contains(static_cast<double>(x), static_cast<double>(y))) m.set(y, x);
    }
  }
}

// True if the rectangle grown by one pixel overlaps any foreground of `m`.
bool touches(const BinaryMask& m, std::size_t top, std::size_t left, std::size_t h, std::size_t w) {
  const std::size_t y0 = top == 0 ? 0 : top - 1, x0 = left == 0 ? 0 : left - 1;
  const std::size_t y1 = std::min(m.height() - 1, top + h), x1 = std::min(m.width() - 1, left + w);
  for (std::size_t y = y0; y <= y1; ++y) {
    for (std::size_t x = x0; x <= x1; ++x) {
      if (m.at(y, x)) return true;
    }
  }
  return false;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index * 0xBF58476D1CE4E5B9ULL +
                    attempt * 0x94D049BB133111EBULL + 0x2545F4914F6CDD1DULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Fixture build(detail::Rng& rng, std::size_t size) {
  const double S = static_cast<double>(size);
  std::array<Ellipse, 2> lungs;
  for (int side = 0; side < 2; ++side) {
    const double base_x = side == 0 ? 0.30 : 0.70;
    lungs[side] = {S * (base_x + rng.uniform(-0.03, 0.03)), S * (0.5 + rng.uniform(-0.05, 0.05)),
                   S * rng.uniform(0.10, 0.13), S * rng.uniform(0.25, 0.33)};
  }

  Fixture f{GrayImage(size, size), BinaryMask(size, size), BinaryMask(size, size)};
  for (const auto& e : lungs) paint(f.gt, e);
  for (const auto& e : lungs) {
    paint(f.pred, {e.cx, e.cy, e.rx * rng.uniform(0.95, 1.05), e.ry * rng.uniform(0.95, 1.05)});
  }

  // Spurious fragments, each its own component and disjoint from the ground truth.
  BinaryMask occupied = f.pred;
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      if (f.gt.at(y, x)) occupied.set(y, x);
    }
  }
  const auto fragments = rng.integer(1, 4);
  for (std::int64_t n = 0, tries = 0; n < fragments && tries < 200; ++tries) {
    const auto h = static_cast<std::size_t>(rng.integer(1, 3));
    const auto w = static_cast<std::size_t>(rng.integer(1, 3));
    const auto top = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(size - h)));
    const auto left = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(size - w)));
    if (touches(occupied, top, left, h, w)) continue;
    for (std::size_t y = top; y < top + h; ++y) {
      for (std::size_t x = left; x < left + w; ++x) {
        f.pred.set(y, x);
        occupied.set(y, x);
      }
    }
    ++n;
  }

  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double base = f.gt.at(y, x) ? 170.0 : 50.0;
      const double v = base + static_cast<double>(rng.integer(-25, 25));
      f.image.at(y, x) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return f;
}

bool well_formed(const Fixture& f) {
  return label_components(f.gt, Connectivity::Eight).stats.size() == 2 &&
         label_components(f.pred, Connectivity::Eight).stats.size() > 2;
}

}  // namespace

Fixture make_fixture(std::uint64_t seed, std::size_t index, std::size_t size) {
  if (size < kMinFixtureSize) {
    throw ConfigError("fixture size must be at least " + std::to_string(kMinFixtureSize));
  }
  // Rejection keeps the construction guarantees (2 gt components, > 2 predicted) exact.
  for (std::uint64_t attempt = 0;; ++attempt) {
    detail::Rng rng(mix(seed, index, attempt));
    Fixture f = build(rng, size);
    if (well_formed(f)) return f;
  }
}

std::string fixture_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case_%04zu", index);
  return buf;
}

std::vector<std::string> generate_fixtures(const std::filesystem::path& out_dir,
                                           std::uint64_t seed, std::size_t count,
                                           std::size_t size) {
  std::error_code ec;
  for (const char* sub : {"images", "gt", "pred"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) {
    const Fixture f = make_fixture(seed, i, size);
    const std::string id = fixture_id(i);
    write_gray(f.image, out_dir / "images" / (id + ".png"));
    write_mask(f.gt, out_dir / "gt" / (id + ".png"));
    write_mask(f.pred, out_dir / "pred" / (id + ".png"));
    ids.push_back(id);
  }
  return ids;
}

}  // namespace lungseg
