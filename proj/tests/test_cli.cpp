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
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "lungseg/components.hpp"
#include "lungseg/decoder.hpp"
#include "lungseg/fixtures.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/overlay.hpp"
#include "oracles.hpp"

using namespace lungseg;
namespace fs = std::filesystem;
using lungseg::testing::flood_fill_labels;
using lungseg::testing::scratch_dir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("no subcommand is a usage error") { CHECK(run({}).code != 0); }

TEST_CASE("synth + eval") {
  const auto dir = scratch_dir("cli_eval");
  REQUIRE(run({"synth", "--out", s(dir), "--seed", "7", "--count", "4", "--size", "32"}).code == 0);
  const auto r = run({"eval", "--pred", s(dir / "pred"), "--gt", s(dir / "gt"), "--post",
                      "--out-csv", s(dir / "r.csv"), "--out-json", s(dir / "r.json")});
  CHECK(r.code == cli::kExitOk);
  CHECK(slurp(dir / "r.csv").find("case_0003,") != std::string::npos);

  SUBCASE("warnings exit with 2") {
    write_mask(BinaryMask(32, 32), dir / "pred" / "orphan.png");
    const auto w = run({"eval", "--pred", s(dir / "pred"), "--gt", s(dir / "gt"), "--out-csv",
                        s(dir / "w.csv"), "--out-json", s(dir / "w.json")});
    CHECK(w.code == cli::kExitWarned);
    CHECK(w.err.find("orphan") != std::string::npos);
  }
  SUBCASE("bad connectivity") {
    const auto b = run({"eval", "--pred", s(dir / "pred"), "--gt", s(dir / "gt"), "--connectivity",
                        "6", "--out-csv", s(dir / "b.csv"), "--out-json", s(dir / "b.json")});
    CHECK(b.code == cli::kExitError);
    CHECK(b.err.find("connectivity") != std::string::npos);
  }
}

TEST_CASE("post subcommand") {
  const auto dir = scratch_dir("cli_post");
  SUBCASE("three fragments -> two components") {
    BinaryMask m(20, 20);
    for (std::size_t y = 1; y < 8; ++y)
      for (std::size_t x = 1; x < 8; ++x) m.set(y, x);
    for (std::size_t y = 11; y < 19; ++y)
      for (std::size_t x = 11; x < 17; ++x) m.set(y, x);
    m.set(1, 15);
    write_mask(m, dir / "in.png");
    REQUIRE(run({"post", "--in", s(dir / "in.png"), "--out", s(dir / "out.png")}).code == 0);
    std::vector<std::size_t> areas;
    flood_fill_labels(read_mask(dir / "out.png"), 8, &areas);
    CHECK(areas == std::vector<std::size_t>{49, 48});
  }
  SUBCASE("single blob gives identical bytes, empty stays empty") {
    BinaryMask blob(10, 10);
    blob.set(4, 4);
    blob.set(4, 5);
    write_mask(blob, dir / "blob.png");
    write_mask(BinaryMask(10, 10), dir / "empty.png");
    REQUIRE(run({"post", "--in", s(dir / "blob.png"), "--out", s(dir / "blob_out.png")}).code == 0);
    CHECK(slurp(dir / "blob.png") == slurp(dir / "blob_out.png"));
    REQUIRE(run({"post", "--in", s(dir / "empty.png"), "--out", s(dir / "empty_out.png")}).code == 0);
    CHECK(read_mask(dir / "empty_out.png").count() == 0);
  }
  SUBCASE("directory mode keeps file names and reports bad files") {
    generate_fixtures(dir / "ds", 5, 3, 32);
    std::ofstream(dir / "ds" / "pred" / "broken.png") << "nope";
    const auto r = run({"post", "--in", s(dir / "ds" / "pred"), "--out", s(dir / "cleaned"), "--k", "2"});
    CHECK(r.code == cli::kExitWarned);
    CHECK(r.err.find("broken.png") != std::string::npos);
    for (const char* id : {"case_0000", "case_0001", "case_0002"}) {
      const BinaryMask out = read_mask(dir / "cleaned" / (std::string(id) + ".png"));
      CHECK(label_components(out).stats.size() == 2);
    }
  }
}

TEST_CASE("forward subcommand") {
  const auto dir = scratch_dir("cli_forward");
  generate_fixtures(dir, 7, 1, 32);
  REQUIRE(run({"init-weights", "--seed", "3", "--out", s(dir / "w.segw"), "--write-config",
               s(dir / "model.cfg")}).code == 0);
  const std::string image = s(dir / "images" / "case_0000.png");

  const auto r = run({"forward", "--image", image, "--weights", s(dir / "w.segw"), "--config",
                      s(dir / "model.cfg"), "--out-mask", s(dir / "mask.png"), "--out-prob",
                      s(dir / "prob.npy"), "--out-raw-mask", s(dir / "raw.png")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("2x32x32") != std::string::npos);
  CHECK(slurp(dir / "prob.npy").find("(2, 32, 32)") != std::string::npos);
  const BinaryMask post = read_mask(dir / "mask.png");
  CHECK(post.height() == 32);
  CHECK(label_components(post).stats.size() <= 2);

  // Determinism.
  REQUIRE(run({"forward", "--image", image, "--weights", s(dir / "w.segw"), "--config",
               s(dir / "model.cfg"), "--out-mask", s(dir / "mask2.png")}).code == 0);
  CHECK(slurp(dir / "mask.png") == slurp(dir / "mask2.png"));

  SUBCASE("--no-post writes the argmax mask") {
    REQUIRE(run({"forward", "--image", image, "--weights", s(dir / "w.segw"), "--config",
                 s(dir / "model.cfg"), "--out-mask", s(dir / "nopost.png"), "--no-post"}).code == 0);
    CHECK(read_mask(dir / "nopost.png") == read_mask(dir / "raw.png"));
  }
  SUBCASE("indivisible size names the multiple") {
    write_gray(GrayImage(33, 32, 10), dir / "odd.png");
    const auto e = run({"forward", "--image", s(dir / "odd.png"), "--weights", s(dir / "w.segw"),
                        "--config", s(dir / "model.cfg"), "--out-mask", s(dir / "x.png")});
    CHECK(e.code == cli::kExitError);
    CHECK(e.err.find("multiple of 16") != std::string::npos);
  }
  SUBCASE("weights from another config") {
    std::ofstream(dir / "other.cfg") << "block_channels = 32, 16, 8, 4\nencoder_channels = 64\n";
    const auto e = run({"forward", "--image", image, "--weights", s(dir / "w.segw"), "--config",
                        s(dir / "other.cfg"), "--out-mask", s(dir / "x.png")});
    CHECK(e.code == cli::kExitError);
    CHECK(e.err.find("encoder 0") != std::string::npos);
  }
}

TEST_CASE("overlay subcommand") {
  const auto dir = scratch_dir("cli_overlay");
  generate_fixtures(dir, 9, 1, 32);
  const std::string image = s(dir / "images" / "case_0000.png");
  const std::string gt = s(dir / "gt" / "case_0000.png");
  const std::string pred = s(dir / "pred" / "case_0000.png");

  REQUIRE(run({"overlay", "--image", image, "--mask", gt, "--out", s(dir / "a0.png"), "--alpha", "0"}).code == 0);
  const GrayImage g = read_gray(image);
  const RgbImage a0 = read_rgb(dir / "a0.png");
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    CHECK(a0.pixels[3 * i] == g.pixels[i]);
    CHECK(a0.pixels[3 * i + 2] == g.pixels[i]);
  }

  REQUIRE(run({"overlay", "--image", image, "--mask", pred, "--gt", gt, "--out", s(dir / "cmp.png"),
               "--alpha", "1"}).code == 0);
  REQUIRE(run({"overlay", "--image", image, "--mask", pred, "--gt", gt, "--out", s(dir / "cmp2.png"),
               "--alpha", "1"}).code == 0);
  CHECK(slurp(dir / "cmp.png") == slurp(dir / "cmp2.png"));
  const RgbImage cmp = read_rgb(dir / "cmp.png");
  const BinaryMask gm = read_mask(gt), pm = read_mask(pred);
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) {
      if (pm.at(y, x) && !gm.at(y, x)) CHECK(cmp.at(y, x) == kExtraColor);
      if (gm.at(y, x) && !pm.at(y, x)) CHECK(cmp.at(y, x) == kMissedColor);
      if (gm.at(y, x) && pm.at(y, x)) CHECK(cmp.at(y, x) == kAgreeColor);
    }

  const auto bad = run({"overlay", "--image", image, "--mask", gt, "--out", s(dir / "c.png"), "--color", "xyz"});
  CHECK(bad.code == cli::kExitError);
}
