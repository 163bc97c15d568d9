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

#include "lungseg/components.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }

  std::uint32_t find(std::uint32_t n) {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];  // path halving
      n = parent_[n];
    }
    return n;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller provisional label becomes the root.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::Four;
  if (n == 8) return Connectivity::Eight;
  throw ConfigError("connectivity must be 4 or 8, got " + std::to_string(n));
}

Components label_components(const BinaryMask& m, Connectivity conn) {
  if (conn != Connectivity::Four && conn != Connectivity::Eight) {
    throw ConfigError("connectivity must be 4 or 8");
  }
  const bool eight = conn == Connectivity::Eight;
  const std::size_t H = m.height(), W = m.width();
  Components out{LabelImage(H, W), {}};
  auto& lab = out.labels;

  // First pass: provisional labels from the already-visited neighbours
  // (W, NW, N, NE for 8-connectivity; W, N for 4).
  DisjointSet sets;
  sets.make();  // index 0 reserved for background
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      if (!m.at(y, x)) continue;
      std::uint32_t cur = 0;
      auto visit = [&](std::size_t ny, std::size_t nx) {
        const std::uint32_t l = lab.at(ny, nx);
        if (l == 0) return;
        if (cur == 0) {
          cur = l;
        } else if (cur != l) {
          sets.unite(cur, l);
        }
      };
      if (x > 0) visit(y, x - 1);
      if (y > 0) {
        if (eight && x > 0) visit(y - 1, x - 1);
        visit(y - 1, x);
        if (eight && x + 1 < W) visit(y - 1, x + 1);
      }
      lab.at(y, x) = cur != 0 ? cur : sets.make();
    }
  }

  // Second pass: resolve equivalences and renumber in raster order of first encounter.
  std::vector<std::uint32_t> final_label;
  std::uint32_t next = 0;
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      std::uint32_t& l = lab.at(y, x);
      if (l == 0) continue;
      const std::uint32_t root = sets.find(l);
      if (root >= final_label.size()) final_label.resize(root + 1, 0);
      if (final_label[root] == 0) {
        final_label[root] = ++next;
        ComponentStats s;
        s.label = next;
        s.bbox = {x, y, 0, 0};
        out.stats.push_back(s);
      }
      l = final_label[root];
    }
  }

  // Stats: area, bounding box, centroid.
  std::vector<std::size_t> right(next, 0), bottom(next, 0);
  std::vector<double> sum_x(next, 0.0), sum_y(next, 0.0);
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      const std::uint32_t l = lab.at(y, x);
      if (l == 0) continue;
      auto& s = out.stats[l - 1];
      ++s.area;
      s.bbox.left = std::min(s.bbox.left, x);
      s.bbox.top = std::min(s.bbox.top, y);
      right[l - 1] = std::max(right[l - 1], x);
      bottom[l - 1] = std::max(bottom[l - 1], y);
      sum_x[l - 1] += static_cast<double>(x);
      sum_y[l - 1] += static_cast<double>(y);
    }
  }
  for (std::size_t i = 0; i < next; ++i) {
    auto& s = out.stats[i];
    s.bbox.width = right[i] - s.bbox.left + 1;
    s.bbox.height = bottom[i] - s.bbox.top + 1;
    s.centroid_x = sum_x[i] / static_cast<double>(s.area);
    s.centroid_y = sum_y[i] / static_cast<double>(s.area);
  }
  return out;
}

BinaryMask keep_largest_k(const BinaryMask& m, std::size_t k, Connectivity conn) {
  if (k == 0) throw ConfigError("keep_largest_k: k must be >= 1");
  const Components cc = label_components(m, conn);
  if (cc.stats.size() <= k) return m;

  std::vector<std::size_t> order(cc.stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cc.stats[a].area > cc.stats[b].area;
  });
  std::vector<std::uint8_t> keep(cc.stats.size() + 1, 0);
  for (std::size_t i = 0; i < k; ++i) keep[cc.stats[order[i]].label] = 1;

  std::vector<std::uint8_t> bits(m.size(), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = keep[cc.labels.labels[i]];
  return BinaryMask(m.height(), m.width(), std::move(bits));
}

BinaryMask post_process(const Tensor& prob, std::size_t lung_class, double threshold,
                        std::size_t k, Connectivity conn) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("post_process: threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  if (lung_class >= prob.channels()) {
    throw ConfigError("post_process: lung_class " + std::to_string(lung_class) +
                      " out of range for " + std::to_string(prob.channels()) + " channels");
  }
  const auto plane = prob.plane(lung_class);
  std::vector<std::uint8_t> bits(plane.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = plane[i] >= threshold ? 1 : 0;
  return keep_largest_k(BinaryMask(prob.height(), prob.width(), std::move(bits)), k, conn);
}

}  // namespace lungseg
