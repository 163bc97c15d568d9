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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lungseg/components.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/metrics.hpp"

namespace lungseg {

struct EvalOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  bool post = false;
  std::size_t k = kDefaultKeep;
  Connectivity connectivity = kDefaultConnectivity;
  std::uint8_t threshold = kDefaultMaskThreshold;  // mask read threshold
  std::size_t jobs = 1;
};

struct EvalRow {
  std::string id;
  PairReport raw;
  std::optional<PairReport> post;
};

struct SkippedPair {
  std::string id;
  std::string error;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by id
  Summary raw;
  std::optional<Summary> post;
  std::vector<std::string> warnings;
  std::vector<SkippedPair> skipped;

  // metadata
  bool post_requested = false;
  std::size_t k = kDefaultKeep;
  int connectivity = 8;
  int threshold = kDefaultMaskThreshold;
  std::string config_hash;
  std::string timestamp;

  /// Any pairing warning or skipped pair.
  bool warned() const { return !warnings.empty() || !skipped.empty(); }
};

/// Pairs the directories, scores every pair (optionally also after keep_largest_k) and
/// aggregates. Pairs that fail to load are recorded in `skipped`. Output does not depend
/// on `jobs`.
EvalReport run_eval(const EvalOptions& opt);

/// Columns: id,dice,iou,dice_post,iou_post,degenerate; six decimals. Post columns are empty
/// without post-processing. Two trailing rows "@macro" and "@micro" hold the summaries.
std::string format_csv(const EvalReport& r);

/// Summary + metadata with full-precision numbers. `include_timestamp = false` drops the
/// only run-dependent field.
std::string format_json(const EvalReport& r, bool include_timestamp = true);

}  // namespace lungseg
