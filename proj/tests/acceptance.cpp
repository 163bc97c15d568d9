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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lungseg/components.hpp"
#include "lungseg/decoder.hpp"
#include "lungseg/errors.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/metrics.hpp"
#include "lungseg/weights.hpp"
#include "oracles.hpp"

using namespace lungseg;
namespace fs = std::filesystem;
namespace t = lungseg::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> body;
};

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

Outcome metric_exactness() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const std::size_t h = dim(rng), w = dim(rng);
    const BinaryMask pred = t::random_mask(rng, h, w, density(rng));
    const BinaryMask gt = t::random_mask(rng, h, w, density(rng));
    // Brute-force pixel loop.
    std::size_t a = 0, b = 0, inter = 0, uni = 0;
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const bool in_a = gt.at(y, x), in_b = pred.at(y, x);
        a += in_a;
        b += in_b;
        inter += in_a && in_b;
        uni += in_a || in_b;
      }
    const double d = dice(pred, gt), j = iou(pred, gt);
    const double d_ref = a + b == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
    const double j_ref = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    o.require(d == d_ref, "dice differs from pixel-loop oracle at pair " + std::to_string(n));
    o.require(j == j_ref, "iou differs from pixel-loop oracle at pair " + std::to_string(n));
    o.require(std::abs(d - 2 * j / (1 + j)) <= 1e-12, "dice = 2iou/(1+iou) violated at pair " + std::to_string(n));
  }
  return o;
}

Outcome labeling_correctness() {
  Outcome o;
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> density(0.05, 0.95);
  for (int n = 0; n < 500; ++n) {
    const BinaryMask m = t::random_mask(rng, 64, 64, density(rng));
    for (int conn : {4, 8}) {
      const auto oracle = t::flood_fill_labels(m, conn);
      const auto got = label_components(m, connectivity_from_int(conn)).labels.labels;
      o.require(got == oracle, "partition differs from BFS at mask " + std::to_string(n) +
                                   ", connectivity " + std::to_string(conn));
    }
  }
  return o;
}

Outcome post_processing_behavior(const fs::path& root) {
  Outcome o;
  const fs::path ds = root / "fixtures";
  fs::remove_all(ds);
  o.require(run_cli({"synth", "--out", ds.string(), "--seed", "7", "--count", "20"}) == 0, "synth failed");
  const int code = run_cli({"eval", "--pred", (ds / "pred").string(), "--gt", (ds / "gt").string(),
                            "--post", "--out-csv", (root / "post.csv").string(), "--out-json",
                            (root / "post.json").string()});
  o.require(code == 0, "eval --post exit code " + std::to_string(code));
  const auto rows = read_csv(root / "post.csv");
  o.require(rows.size() == 1 + 20 + 2, "expected 20 image rows plus 2 summary rows");
  if (!o.ok) return o;
  for (std::size_t i = 1; i <= 20; ++i) {
    o.require(std::stod(rows[i][3]) >= std::stod(rows[i][1]), "dice_post < dice for " + rows[i][0]);
  }
  const auto& macro = rows[21];
  o.require(macro[0] == "@macro", "missing @macro row");
  o.require(std::stod(macro[3]) > std::stod(macro[1]), "macro dice_post not strictly greater");

  o.require(run_cli({"post", "--in", (ds / "pred").string(), "--out", (root / "cleaned").string()}) == 0,
            "post failed");
  for (std::size_t i = 1; i <= 20; ++i) {
    const BinaryMask m = read_mask(root / "cleaned" / (rows[i][0] + ".png"));
    o.require(label_components(m).stats.size() <= 2, rows[i][0] + " has more than 2 components");
  }
  return o;
}

Outcome forward_contract() {
  Outcome o;
  const DecoderConfig c;
  const WeightStore w = random_weights(c, 4);
  std::mt19937_64 rng(4004);
  const Tensor img = t::random_tensor(rng, 1, 32, 32, 0.0, 1.0);
  const Tensor p = forward(img, w, c);
  o.require(p.channels() == 2 && p.height() == 32 && p.width() == 32, "output shape is not 2x32x32");
  for (std::size_t i = 0; i < p.plane_size(); ++i) {
    const double sum = p.plane(0)[i] + p.plane(1)[i];
    o.require(std::abs(sum - 1.0) <= 1e-6, "channel sum off by more than 1e-6");
  }
  for (int r = 0; r < 2; ++r) o.require(forward(img, w, c) == p, "repeated run not bit-identical");
  std::vector<Tensor> batch(6, img);
  for (const auto& q : forward_batch(batch, w, c, 3)) {
    o.require(q == p, "parallel batch result not bit-identical");
  }
  return o;
}

Outcome convolution_oracle() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::uniform_int_distribution<std::size_t> ch(1, 4), sz(1, 16), ks(0, 1);
  for (int n = 0; n < 100; ++n) {
    const std::size_t kh = 2 * ks(rng) + 1, kw = 2 * ks(rng) + 1;
    const Tensor x = t::random_tensor(rng, ch(rng), sz(rng), sz(rng));
    const KernelBank k = t::random_kernel(rng, ch(rng), x.channels(), kh, kw);
    o.require(t::max_rel_error(conv2d(x, k), t::conv_direct(x, k)) <= 1e-5,
              "relative error above 1e-5 at case " + std::to_string(n));
  }
  return o;
}

Outcome self_evaluation(const fs::path& root) {
  Outcome o;
  const fs::path ds = root / "self";
  fs::remove_all(ds);
  o.require(run_cli({"synth", "--out", ds.string(), "--seed", "7", "--count", "20"}) == 0, "synth failed");
  const int code = run_cli({"eval", "--pred", (ds / "gt").string(), "--gt", (ds / "gt").string(),
                            "--out-csv", (root / "self.csv").string(), "--out-json",
                            (root / "self.json").string()});
  o.require(code == 0, "eval exit code " + std::to_string(code));
  const auto rows = read_csv(root / "self.csv");
  if (rows.size() < 3) {
    o.require(false, "CSV too short");
    return o;
  }
  for (const auto& row : {rows[rows.size() - 2], rows[rows.size() - 1]}) {
    o.require(row[0] == "@macro" || row[0] == "@micro", "missing summary row");
    o.require(row[1] == "1.000000" && row[2] == "1.000000", row[0] + " is not 1.000000");
  }
  return o;
}

Outcome serialization(const fs::path& root) {
  Outcome o;
  const DecoderConfig c;
  const WeightStore w = random_weights(c, 7007);
  const fs::path file = root / "w.segw";
  save_weights(w, file);
  o.require(load_weights(file, c) == w, "round-trip not exact");

  std::ifstream in(file, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  {
    std::ofstream(root / "trunc.segw", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    bool truncated = false;
    try {
      load_weights(root / "trunc.segw", c);
    } catch (const TruncatedError&) {
      truncated = true;
    } catch (const Error&) {
    }
    o.require(truncated, "truncated file did not raise TruncatedError");
  }
  {
    DecoderConfig other = c;
    other.block_channels = {256, 64, 64, 32};
    save_weights(random_weights(other, 1), root / "shape.segw");
    std::string msg;
    try {
      load_weights(root / "shape.segw", c);
    } catch (const ShapeMismatchError& e) {
      msg = e.what();
    } catch (const Error&) {
    }
    o.require(msg.find("block 1") != std::string::npos, "shape mismatch did not name block 1");
  }
  return o;
}

Outcome worked_example() {
  Outcome o;
  // 3x3 grid: A = {2,3,4,5}, B = {0,1,2,3}
  BinaryMask a(3, 3), b(3, 3);
  for (std::size_t i : {2, 3, 4, 5}) a.set(i / 3, i % 3);
  for (std::size_t i : {0, 1, 2, 3}) b.set(i / 3, i % 3);
  const auto s = t::set_counts(b, a);
  o.require(s.a == 4 && s.b == 4 && s.inter == 2, "set enumeration mismatch");
  o.require(dice(b, a) == 0.5, "dice != 0.5");
  o.require(std::abs(iou(b, a) - 1.0 / 3.0) <= 1e-15, "iou != 1/3");
  return o;
}

}  // namespace

int main() {
  const char* base = std::getenv("LUNGSEG_TMP");
  const fs::path root = base ? fs::path(base) : fs::temp_directory_path() / "lungseg_acceptance";
  fs::create_directories(root);

  const std::vector<Criterion> criteria{
      {1, "metric exactness (1000 pairs vs pixel-loop oracle)", 5.0, metric_exactness},
      {2, "labeling matches BFS flood fill (500 masks, 4/8)", 10.0, labeling_correctness},
      {3, "post-processing improves fixture dice (seed 7, 20 images)", 5.0,
       [&] { return post_processing_behavior(root); }},
      {4, "forward contract (2x32x32, sums, determinism)", 5.0, forward_contract},
      {5, "conv2d vs nested-loop oracle (100 cases)", 5.0, convolution_oracle},
      {6, "self-evaluation gives 1.000000", 5.0, [&] { return self_evaluation(root); }},
      {7, "weight serialization round-trip and errors", 1.0, [&] { return serialization(root); }},
      {8, "worked example dice 0.5, iou 1/3", 1.0, worked_example},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.time_limit_s) {
      o.ok = false;
      o.detail = "exceeded time limit of " + std::to_string(c.time_limit_s) + " s";
    }
    std::printf("[%s] criterion %d: %s (%.3f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                secs, o.ok ? "" : " -- ", o.detail.c_str());
    failures += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
