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

#include "lungseg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <thread>

#include "json.hpp"
#include "lungseg/dataset.hpp"
#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct PairOutcome {
  std::optional<EvalRow> row;
  std::string error;
};

PairOutcome evaluate_pair(const DatasetPair& p, const EvalOptions& opt) {
  PairOutcome out;
  try {
    const BinaryMask pred = read_mask(p.pred, opt.threshold);
    const BinaryMask gt = read_mask(p.gt, opt.threshold);
    EvalRow row{p.id, make_pair_report(p.id, pred, gt, false), std::nullopt};
    if (opt.post) {
      row.post = make_pair_report(p.id, keep_largest_k(pred, opt.k, opt.connectivity), gt, true);
    }
    out.row = std::move(row);
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

nlohmann::json summary_json(const Summary& s) {
  return {{"count", s.count},
          {"degenerate_count", s.degenerate_count},
          {"macro_dice", s.macro_dice},
          {"macro_iou", s.macro_iou},
          {"micro_dice", s.micro_dice},
          {"micro_iou", s.micro_iou},
          {"pooled", {{"tp", s.pooled.tp}, {"fp", s.pooled.fp}, {"fn", s.pooled.fn},
                      {"tn", s.pooled.tn}}}};
}

}  // namespace

EvalReport run_eval(const EvalOptions& opt) {
  if (opt.k == 0) throw ConfigError("k must be >= 1");
  const DatasetPairing pairing = pair_dataset(opt.pred_dir, opt.gt_dir);

  std::vector<PairOutcome> outcomes(pairing.pairs.size());
  const std::size_t jobs = std::clamp<std::size_t>(opt.jobs, 1, pairing.pairs.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i] = evaluate_pair(pairing.pairs[i], opt);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < outcomes.size(); i = next++) {
          outcomes[i] = evaluate_pair(pairing.pairs[i], opt);
        }
      });
    }
  }

  EvalReport r;
  r.warnings = pairing.warnings;
  r.post_requested = opt.post;
  r.k = opt.k;
  r.connectivity = static_cast<int>(opt.connectivity);
  r.threshold = opt.threshold;
  r.config_hash = fnv1a_hex("post=" + std::to_string(opt.post) + ";k=" + std::to_string(opt.k) +
                            ";connectivity=" + std::to_string(r.connectivity) +
                            ";threshold=" + std::to_string(r.threshold));
  r.timestamp = utc_timestamp();
  // pairing.pairs is sorted by id, so rows are too.
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].row) {
      r.rows.push_back(std::move(*outcomes[i].row));
    } else {
      r.skipped.push_back({pairing.pairs[i].id, outcomes[i].error});
    }
  }
  if (r.rows.empty()) throw Error("no pair could be evaluated; first error: " + r.skipped.front().error);

  std::vector<PairReport> raw, post;
  for (const auto& row : r.rows) {
    raw.push_back(row.raw);
    if (row.post) post.push_back(*row.post);
  }
  r.raw = aggregate(raw);
  if (opt.post) r.post = aggregate(post);
  return r;
}

std::string format_csv(const EvalReport& r) {
  std::string out = "id,dice,iou,dice_post,iou_post,degenerate\n";
  for (const auto& row : r.rows) {
    out += row.id + "," + fixed6(row.raw.dice) + "," + fixed6(row.raw.iou) + ",";
    if (row.post) out += fixed6(row.post->dice) + "," + fixed6(row.post->iou);
    else out += ",";
    out += row.raw.degenerate() ? ",1\n" : ",0\n";
  }
  auto summary_row = [&](const char* id, double Summary::*dice_field, double Summary::*iou_field) {
    out += std::string(id) + "," + fixed6(r.raw.*dice_field) + "," + fixed6(r.raw.*iou_field) + ",";
    if (r.post) out += fixed6((*r.post).*dice_field) + "," + fixed6((*r.post).*iou_field);
    else out += ",";
    out += ",\n";
  };
  summary_row("@macro", &Summary::macro_dice, &Summary::macro_iou);
  summary_row("@micro", &Summary::micro_dice, &Summary::micro_iou);
  return out;
}

std::string format_json(const EvalReport& r, bool include_timestamp) {
  nlohmann::json meta = {{"config_hash", r.config_hash},
                         {"post", r.post_requested},
                         {"k", r.k},
                         {"connectivity", r.connectivity},
                         {"threshold", r.threshold},
                         {"pairs", r.rows.size()},
                         {"headline", "macro"}};
  if (include_timestamp) meta["timestamp"] = r.timestamp;
  nlohmann::json j = {{"metadata", meta},
                      {"raw", summary_json(r.raw)},
                      {"post", r.post ? summary_json(*r.post) : nlohmann::json(nullptr)},
                      {"warnings", r.warnings}};
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"id", s.id}, {"error", s.error}});
  j["skipped"] = skipped;
  return j.dump(2) + "\n";
}

}  // namespace lungseg
