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

#include <cstdint>
#include <span>
#include <string>

#include "lungseg/mask.hpp"

namespace lungseg {

/// Confusion counts for the foreground class; A = ground truth, B = prediction.
/// |A∩B| = tp, |A| = tp + fn, |B| = tp + fp, |A∪B| = tp + fp + fn.
struct OverlapCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  /// Both masks empty: neither metric has a denominator.
  bool degenerate() const { return tp + fp + fn == 0; }

  OverlapCounts& operator+=(const OverlapCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }

  friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

/// Throws ContractError naming both shapes when dimensions differ.
OverlapCounts overlap_counts(const BinaryMask& pred, const BinaryMask& gt);

// Foreground-only scores; tn never enters. Degenerate (both empty) pairs score 1.0.
double dice(const OverlapCounts& c);
double iou(const OverlapCounts& c);
double dice(const BinaryMask& pred, const BinaryMask& gt);
double iou(const BinaryMask& pred, const BinaryMask& gt);

struct PairReport {
  std::string id;
  double dice = 0.0;
  double iou = 0.0;
  OverlapCounts counts;
  bool post_processed = false;

  bool degenerate() const { return counts.degenerate(); }
};

PairReport make_pair_report(std::string id, const BinaryMask& pred, const BinaryMask& gt,
                            bool post_processed);

struct Summary {
  std::size_t count = 0;
  std::size_t degenerate_count = 0;
  double macro_dice = 0.0;  // headline: unweighted mean of per-image scores
  double macro_iou = 0.0;
  double micro_dice = 0.0;  // from pooled counts
  double micro_iou = 0.0;
  OverlapCounts pooled;
};

/// Macro and micro aggregation. Throws ConfigError on an empty list, or when every pair
/// is excluded by `exclude_degenerate`.
Summary aggregate(std::span<const PairReport> reports, bool exclude_degenerate = false);

}  // namespace lungseg
