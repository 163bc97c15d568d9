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

#include "lungseg/metrics.hpp"

#include "lungseg/errors.hpp"

namespace lungseg {

OverlapCounts overlap_counts(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw ContractError("mask dimension mismatch: prediction " + pred.shape_string() +
                        " vs ground truth " + gt.shape_string());
  }
  OverlapCounts c;
  const auto& p = pred.bits();
  const auto& g = gt.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    // index = 2*pred + gt: 0 tn, 1 fn, 2 fp, 3 tp
    switch ((p[i] << 1) | g[i]) {
      case 0: ++c.tn; break;
      case 1: ++c.fn; break;
      case 2: ++c.fp; break;
      default: ++c.tp; break;
    }
  }
  return c;
}

double dice(const OverlapCounts& c) {
  if (c.degenerate()) return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

double iou(const OverlapCounts& c) {
  if (c.degenerate()) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp + c.fn);
}

double dice(const BinaryMask& pred, const BinaryMask& gt) { return dice(overlap_counts(pred, gt)); }

double iou(const BinaryMask& pred, const BinaryMask& gt) { return iou(overlap_counts(pred, gt)); }

PairReport make_pair_report(std::string id, const BinaryMask& pred, const BinaryMask& gt,
                            bool post_processed) {
  PairReport r;
  r.id = std::move(id);
  r.counts = overlap_counts(pred, gt);
  r.dice = dice(r.counts);
  r.iou = iou(r.counts);
  r.post_processed = post_processed;
  return r;
}

Summary aggregate(std::span<const PairReport> reports, bool exclude_degenerate) {
  if (reports.empty()) throw ConfigError("aggregate: no reports to summarize");
  Summary s;
  double sum_dice = 0.0, sum_iou = 0.0;
  for (const auto& r : reports) {
    if (r.degenerate()) {
      ++s.degenerate_count;
      if (exclude_degenerate) continue;
    }
    ++s.count;
    sum_dice += r.dice;
    sum_iou += r.iou;
    s.pooled += r.counts;
  }
  if (s.count == 0) throw ConfigError("aggregate: every pair is degenerate and excluded");
  s.macro_dice = sum_dice / static_cast<double>(s.count);
  s.macro_iou = sum_iou / static_cast<double>(s.count);
  s.micro_dice = dice(s.pooled);
  s.micro_iou = iou(s.pooled);
  return s;
}

}  // namespace lungseg
