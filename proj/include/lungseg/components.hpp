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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lungseg/mask.hpp"
#include "lungseg/nn.hpp"
#include "lungseg/tensor.hpp"

namespace lungseg {

enum class Connectivity : int { Four = 4, Eight = 8 };

/// Throws ConfigError unless n is 4 or 8.
Connectivity connectivity_from_int(int n);

inline constexpr Connectivity kDefaultConnectivity = Connectivity::Eight;
inline constexpr std::size_t kDefaultKeep = 2;
inline constexpr double kDefaultProbThreshold = 0.5;

struct BoundingBox {
  std::size_t left = 0;
  std::size_t top = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Per-component record in the style of OpenCV's connectedComponentsWithStats.
struct ComponentStats {
  std::uint32_t label = 0;
  std::size_t area = 0;
  BoundingBox bbox;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

struct Components {
  LabelImage labels;                 // 0 = background, 1..N in raster order of first pixel
  std::vector<ComponentStats> stats; // stats[i].label == i + 1
};

/// Two-pass union-find labeling of the foreground.
Components label_components(const BinaryMask& m, Connectivity conn = kDefaultConnectivity);

/// Keeps the k largest components; equal areas are ranked by label (raster order).
/// Fewer than k components leaves the mask unchanged.
BinaryMask keep_largest_k(const BinaryMask& m, std::size_t k,
                          Connectivity conn = kDefaultConnectivity);

/// Thresholds the lung-class probability plane (p >= threshold) and keeps the k largest
/// components. threshold must lie strictly inside (0, 1).
BinaryMask post_process(const Tensor& prob, std::size_t lung_class,
                        double threshold = kDefaultProbThreshold, std::size_t k = kDefaultKeep,
                        Connectivity conn = kDefaultConnectivity);

}  // namespace lungseg
