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

#include "lungseg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

bool is_png(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::string sample(const std::map<std::string, std::filesystem::path>& files) {
  if (files.empty()) return "(none)";
  std::string s;
  std::size_t i = 0;
  for (const auto& [stem, path] : files) {
    if (i == 5) {
      s += ", ...";
      break;
    }
    s += (i++ ? ", " : "") + stem;
  }
  return s;
}

std::map<std::string, std::filesystem::path> png_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) {
      files.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return files;
}

}  // namespace

std::vector<std::string> list_stems(const std::filesystem::path& dir) {
  std::vector<std::string> stems;
  for (const auto& [stem, path] : png_files(dir)) stems.push_back(stem);
  return stems;
}

DatasetPairing pair_dataset(const std::filesystem::path& pred_dir,
                            const std::filesystem::path& gt_dir) {
  const auto pred = png_files(pred_dir);
  const auto gt = png_files(gt_dir);

  DatasetPairing out;
  for (const auto& [stem, path] : pred) {
    if (const auto it = gt.find(stem); it != gt.end()) {
      out.pairs.push_back({stem, path, it->second});
    } else {
      out.warnings.push_back("prediction '" + stem + "' has no ground truth in " + gt_dir.string());
    }
  }
  for (const auto& [stem, path] : gt) {
    if (!pred.count(stem)) {
      out.warnings.push_back("ground truth '" + stem + "' has no prediction in " +
                             pred_dir.string());
    }
  }
  if (out.pairs.empty()) {
    throw ConfigError("no common file stems between " + pred_dir.string() + " [" +
                      sample(pred) + "] and " + gt_dir.string() + " [" + sample(gt) + "]");
  }
  return out;
}

}  // namespace lungseg
