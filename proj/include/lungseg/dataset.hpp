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

#include <filesystem>
#include <string>
#include <vector>

namespace lungseg {

struct DatasetPair {
  std::string id;  // shared file stem
  std::filesystem::path pred;
  std::filesystem::path gt;
};

struct DatasetPairing {
  std::vector<DatasetPair> pairs;     // sorted by id
  std::vector<std::string> warnings;  // stems found on one side only
};

/// Stems of the .png files directly inside `dir`, sorted. Throws IoError if `dir` is not a
/// directory.
std::vector<std::string> list_stems(const std::filesystem::path& dir);

/// Pairs files with identical stems. Throws ConfigError when no stem is shared.
DatasetPairing pair_dataset(const std::filesystem::path& pred_dir,
                            const std::filesystem::path& gt_dir);

}  // namespace lungseg
