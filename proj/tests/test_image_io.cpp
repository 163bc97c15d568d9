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

#include <fstream>
#include <iterator>
#include <random>

#include "doctest.h"
#include "lungseg/components.hpp"
#include "lungseg/dataset.hpp"
#include "lungseg/errors.hpp"
#include "lungseg/fixtures.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/metrics.hpp"
#include "lungseg/overlay.hpp"
#include "oracles.hpp"

using namespace lungseg;
namespace fs = std::filesystem;
using lungseg::testing::random_mask;
using lungseg::testing::scratch_dir;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void touch(const fs::path& p, const std::string& text = "") { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("mask files") {
  const auto dir = scratch_dir("io_masks");
  SUBCASE("random masks round-trip") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> dim(1, 50);
    for (int t = 0; t < 40; ++t) {
      const BinaryMask m = random_mask(rng, dim(rng), dim(rng), 0.5);
      write_mask(m, dir / "m.png");
      CHECK(read_mask(dir / "m.png") == m);
    }
  }
  SUBCASE("all-255 and all-0 images") {
    write_gray(GrayImage(4, 5, 255), dir / "white.png");
    write_gray(GrayImage(4, 5, 0), dir / "black.png");
    CHECK(read_mask(dir / "white.png").count() == 20);
    CHECK(read_mask(dir / "black.png").count() == 0);
  }
  SUBCASE("empty and 1x1 masks") {
    write_mask(BinaryMask(6, 3), dir / "empty.png");
    CHECK(read_gray(dir / "empty.png") == GrayImage(6, 3, 0));
    BinaryMask one(1, 1);
    one.set(0, 0);
    write_mask(one, dir / "one.png");
    CHECK(read_mask(dir / "one.png") == one);
  }
  SUBCASE("threshold") {
    GrayImage g(1, 3);
    g.pixels = {127, 128, 200};
    write_gray(g, dir / "t.png");
    const BinaryMask m = read_mask(dir / "t.png");
    CHECK_FALSE(m.at(0, 0));
    CHECK(m.at(0, 1));
    CHECK(read_mask(dir / "t.png", 201).count() == 0);
  }
  SUBCASE("distinct errors") {
    CHECK_THROWS_AS(read_mask(dir / "missing.png"), FileNotFoundError);
    touch(dir / "junk.png", "definitely not a png");
    CHECK_THROWS_AS(read_mask(dir / "junk.png"), DecodeError);
    try {
      read_mask(dir / "junk.png");
    } catch (const ColorImageError&) {
      FAIL("junk decoded as a color image");
    } catch (const DecodeError&) {
    }
    RgbImage color(2, 2);
    color.set(0, 0, {10, 20, 30});
    write_rgb(color, dir / "color.png");
    CHECK_THROWS_AS(read_mask(dir / "color.png"), ColorImageError);
    RgbImage gray_rgb(2, 2);
    gray_rgb.set(1, 1, {200, 200, 200});
    write_rgb(gray_rgb, dir / "grayrgb.png");
    CHECK(read_mask(dir / "grayrgb.png").count() == 1);
    CHECK_THROWS_AS(write_mask(BinaryMask(2, 2), dir / "no" / "such" / "dir.png"), IoError);
  }
}

TEST_CASE("npy writer header") {
  const auto dir = scratch_dir("io_npy");
  write_npy(Tensor(2, 3, 4, 0.25), dir / "p.npy");
  const std::string bytes = slurp(dir / "p.npy");
  CHECK(bytes.substr(0, 6) == "\x93NUMPY");
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  CHECK((10 + header_len) % 64 == 0);
  CHECK(bytes.find("'shape': (2, 3, 4)") != std::string::npos);
  CHECK(bytes.size() == 10 + header_len + 24 * 4);
}

TEST_CASE("render_overlay") {
  GrayImage g(2, 2, 100);
  BinaryMask m(2, 2);
  m.set(0, 0);
  SUBCASE("alpha 0 reproduces the image") {
    const RgbImage o = render_overlay(g, m, kOverlayRed, 0.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(o.at(i / 2, i % 2) == Rgb{100, 100, 100});
  }
  SUBCASE("alpha 1 paints the color") {
    const RgbImage o = render_overlay(g, m, {1, 2, 3}, 1.0);
    CHECK(o.at(0, 0) == Rgb{1, 2, 3});
    CHECK(o.at(1, 1) == Rgb{100, 100, 100});
  }
  SUBCASE("alpha 0.5 rounds half up") {
    // 0.5 * 100 + 0.5 * 255 = 177.5 -> 178; 0.5 * 100 = 50
    CHECK(render_overlay(g, m, kOverlayRed, 0.5).at(0, 0) == Rgb{178, 50, 50});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(render_overlay(g, BinaryMask(3, 2), kOverlayRed, 0.5), ContractError);
    CHECK_THROWS_AS(render_overlay(g, m, kOverlayRed, 1.5), ConfigError);
  }
}

TEST_CASE("render_comparison colors each confusion cell distinctly") {
  GrayImage g(1, 4, 0);
  BinaryMask gt(1, 4), pred(1, 4);
  gt.set(0, 0);
  pred.set(0, 0);
  gt.set(0, 1);
  pred.set(0, 2);
  const RgbImage o = render_comparison(g, gt, pred, 1.0);
  CHECK(o.at(0, 0) == kAgreeColor);
  CHECK(o.at(0, 1) == kMissedColor);
  CHECK(o.at(0, 2) == kExtraColor);
  CHECK(o.at(0, 3) == Rgb{0, 0, 0});
}

TEST_CASE("parse_color") {
  CHECK(parse_color("FF8000") == Rgb{255, 128, 0});
  CHECK(parse_color("#00ff10") == Rgb{0, 255, 16});
  CHECK_THROWS_AS(parse_color("F00"), ConfigError);
  CHECK_THROWS_AS(parse_color("GG0000"), ConfigError);
}

TEST_CASE("pair_dataset") {
  const auto dir = scratch_dir("io_pairing");
  fs::create_directories(dir / "p");
  fs::create_directories(dir / "g");
  fs::create_directories(dir / "x");
  for (const char* s : {"a", "b", "c"}) touch(dir / "p" / (std::string(s) + ".png"));
  for (const char* s : {"b", "c", "d"}) touch(dir / "g" / (std::string(s) + ".png"));
  touch(dir / "g" / "notes.txt");
  touch(dir / "x" / "z.png");

  SUBCASE("intersection with warnings") {
    const DatasetPairing p = pair_dataset(dir / "p", dir / "g");
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.pairs[0].id == "b");
    CHECK(p.pairs[1].id == "c");
    CHECK(p.pairs[0].gt == dir / "g" / "b.png");
    REQUIRE(p.warnings.size() == 2);
    CHECK(p.warnings[0].find("'a'") != std::string::npos);
    CHECK(p.warnings[1].find("'d'") != std::string::npos);
  }
  SUBCASE("identical listings") {
    const DatasetPairing p = pair_dataset(dir / "p", dir / "p");
    CHECK(p.pairs.size() == 3);
    CHECK(p.warnings.empty());
  }
  SUBCASE("disjoint listings") {
    try {
      pair_dataset(dir / "p", dir / "x");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("z") != std::string::npos);
    }
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(pair_dataset(dir / "nope", dir / "g"), IoError); }
}

TEST_CASE("fixtures") {
  SUBCASE("construction guarantees") {
    for (std::size_t size : {32u, 64u}) {
      for (std::size_t i = 0; i < 25; ++i) {
        const Fixture f = make_fixture(7, i, size);
        REQUIRE(label_components(f.gt, Connectivity::Eight).stats.size() == 2);
        REQUIRE(label_components(f.pred, Connectivity::Eight).stats.size() > 2);
        const BinaryMask cleaned = keep_largest_k(f.pred, 2);
        CHECK(dice(cleaned, f.gt) > dice(f.pred, f.gt));
        // Every removed component is disjoint from gt.
        for (std::size_t p = 0; p < f.pred.size(); ++p)
          if (f.pred[p] && !cleaned[p]) CHECK_FALSE(f.gt[p]);
      }
    }
    CHECK_THROWS_AS(make_fixture(1, 0, 16), ConfigError);
  }
  SUBCASE("seed 7, count 5 is byte-identical on regeneration") {
    const auto a = scratch_dir("fixtures_a"), b = scratch_dir("fixtures_b");
    const auto ids = generate_fixtures(a, 7, 5);
    generate_fixtures(b, 7, 5);
    REQUIRE(ids.size() == 5);
    for (const auto& id : ids) {
      for (const char* sub : {"images", "gt", "pred"}) {
        const auto fa = a / sub / (id + ".png");
        REQUIRE(fs::exists(fa));
        CHECK(slurp(fa) == slurp(b / sub / (id + ".png")));
      }
    }
    CHECK(make_fixture(7, 0).image != make_fixture(8, 0).image);
  }
}
