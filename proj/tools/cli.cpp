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

#include "cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lungseg/components.hpp"
#include "lungseg/dataset.hpp"
#include "lungseg/decoder.hpp"
#include "lungseg/errors.hpp"
#include "lungseg/fixtures.hpp"
#include "lungseg/harness.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/overlay.hpp"
#include "lungseg/weights.hpp"

namespace lungseg::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

struct EvalArgs {
  std::string pred, gt, out_csv, out_json;
  bool post = false;
  std::size_t k = kDefaultKeep;
  int connectivity = 8;
  int threshold = kDefaultMaskThreshold;
  std::size_t jobs = 1;
};

int do_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.threshold < 0 || a.threshold > 255) throw ConfigError("--threshold must be 0..255");
  EvalOptions opt;
  opt.pred_dir = a.pred;
  opt.gt_dir = a.gt;
  opt.post = a.post;
  opt.k = a.k;
  opt.connectivity = connectivity_from_int(a.connectivity);
  opt.threshold = static_cast<std::uint8_t>(a.threshold);
  opt.jobs = a.jobs;
  const EvalReport r = run_eval(opt);
  write_text(a.out_csv, format_csv(r));
  write_text(a.out_json, format_json(r));
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  for (const auto& s : r.skipped) err << "warning: skipped " << s.id << ": " << s.error << "\n";
  out << "pairs " << r.rows.size() << "  macro dice " << r.raw.macro_dice << "  iou "
      << r.raw.macro_iou;
  if (r.post) out << "  | post dice " << r.post->macro_dice << "  iou " << r.post->macro_iou;
  out << "\n";
  return r.warned() ? kExitWarned : kExitOk;
}

struct PostArgs {
  std::string in, out;
  std::size_t k = kDefaultKeep;
  int connectivity = 8;
};

int do_post(const PostArgs& a, std::ostream& out, std::ostream& err) {
  const Connectivity conn = connectivity_from_int(a.connectivity);
  if (a.k == 0) throw ConfigError("--k must be >= 1");
  auto one = [&](const fs::path& src, const fs::path& dst) {
    write_mask(keep_largest_k(read_mask(src), a.k, conn), dst);
  };
  if (!fs::is_directory(a.in)) {
    one(a.in, a.out);
    out << "wrote " << a.out << "\n";
    return kExitOk;
  }
  fs::create_directories(a.out);
  std::size_t done = 0, failed = 0;
  for (const auto& stem : list_stems(a.in)) {
    const fs::path src = fs::path(a.in) / (stem + ".png");
    const fs::path dst = fs::path(a.out) / (stem + ".png");
    try {
      one(src, dst);
      ++done;
    } catch (const Error& e) {
      err << "error: " << src.string() << ": " << e.what() << "\n";
      ++failed;
    }
  }
  out << "processed " << done << " masks, " << failed << " failed\n";
  return failed ? kExitWarned : kExitOk;
}

struct ForwardArgs {
  std::string image, weights, config, out_mask, out_prob, out_raw_mask;
  bool no_post = false;
  std::size_t lung_class = 1;
  std::size_t k = kDefaultKeep;
  int connectivity = 8;
  double threshold = kDefaultProbThreshold;
};

int do_forward(const ForwardArgs& a, std::ostream& out) {
  const DecoderConfig cfg = load_config(a.config);
  const WeightStore w = load_weights(a.weights, cfg);
  const Tensor input = cfg.image_channels == 3 ? rgb_to_tensor(read_rgb(a.image))
                                               : gray_to_tensor(read_gray(a.image));
  const Tensor prob = forward(input, w, cfg);
  if (!a.out_prob.empty()) write_npy(prob, a.out_prob);
  const BinaryMask raw = predict_mask(prob, a.lung_class);
  if (!a.out_raw_mask.empty()) write_mask(raw, a.out_raw_mask);
  const BinaryMask final_mask =
      a.no_post ? raw
                : post_process(prob, a.lung_class, a.threshold, a.k,
                               connectivity_from_int(a.connectivity));
  write_mask(final_mask, a.out_mask);
  out << "probabilities " << prob.channels() << "x" << prob.height() << "x" << prob.width()
      << ", foreground " << final_mask.count() << " px\n";
  return kExitOk;
}

struct OverlayArgs {
  std::string image, mask, gt, out, color = "FF0000";
  double alpha = 0.5;
};

int do_overlay(const OverlayArgs& a, std::ostream& out) {
  const GrayImage img = read_gray(a.image);
  const BinaryMask mask = read_mask(a.mask);
  const RgbImage rgb = a.gt.empty()
                           ? render_overlay(img, mask, parse_color(a.color), a.alpha)
                           : render_comparison(img, read_mask(a.gt), mask, a.alpha);
  write_rgb(rgb, a.out);
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 7;
  std::size_t count = 20;
  std::size_t size = kDefaultFixtureSize;
};

struct InitArgs {
  std::string config, out, write_config;
  std::uint64_t seed = 0;
  bool zero = false;
};

int do_init(const InitArgs& a, std::ostream& out) {
  const DecoderConfig cfg = a.config.empty() ? DecoderConfig{} : load_config(a.config);
  cfg.validate();
  save_weights(a.zero ? zero_weights(cfg) : random_weights(cfg, a.seed), a.out);
  if (!a.write_config.empty()) write_text(a.write_config, format_config(cfg));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lungseg: lung mask segmentation, post-processing and evaluation"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score prediction masks against ground truth");
  eval->add_option("--pred", ev.pred, "Prediction mask directory")->required();
  eval->add_option("--gt", ev.gt, "Ground-truth mask directory")->required();
  eval->add_flag("--post", ev.post, "Also score after keeping the k largest components");
  eval->add_option("--k", ev.k, "Components kept by --post")->capture_default_str();
  eval->add_option("--connectivity", ev.connectivity, "4 or 8")->capture_default_str();
  eval->add_option("--threshold", ev.threshold, "Mask read threshold (0-255)")->capture_default_str();
  eval->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str();
  eval->add_option("--out-csv", ev.out_csv, "Per-image CSV report")->required();
  eval->add_option("--out-json", ev.out_json, "JSON summary")->required();

  PostArgs pa;
  auto* post = app.add_subcommand("post", "Keep the k largest components of mask file(s)");
  post->add_option("--in", pa.in, "Mask file or directory")->required();
  post->add_option("--out", pa.out, "Output file or directory")->required();
  post->add_option("--k", pa.k)->capture_default_str();
  post->add_option("--connectivity", pa.connectivity)->capture_default_str();

  ForwardArgs fa;
  auto* fwd = app.add_subcommand("forward", "Run the network on one image");
  fwd->add_option("--image", fa.image)->required();
  fwd->add_option("--weights", fa.weights, "SEGW weight file")->required();
  fwd->add_option("--config", fa.config, "key = value config file")->required();
  fwd->add_option("--out-mask", fa.out_mask, "Final mask")->required();
  fwd->add_option("--out-prob", fa.out_prob, "Probabilities as float32 .npy (K,H,W)");
  fwd->add_option("--out-raw-mask", fa.out_raw_mask, "Argmax mask before post-processing");
  fwd->add_flag("--no-post", fa.no_post, "Skip component filtering");
  fwd->add_option("--lung-class", fa.lung_class)->capture_default_str();
  fwd->add_option("--k", fa.k)->capture_default_str();
  fwd->add_option("--connectivity", fa.connectivity)->capture_default_str();
  fwd->add_option("--threshold", fa.threshold, "Lung probability threshold")->capture_default_str();

  OverlayArgs oa;
  auto* ovl = app.add_subcommand("overlay", "Render a mask (or gt vs prediction) over an image");
  ovl->add_option("--image", oa.image)->required();
  ovl->add_option("--mask", oa.mask, "Mask, or the prediction when --gt is given")->required();
  ovl->add_option("--gt", oa.gt, "Ground truth for comparison mode");
  ovl->add_option("--out", oa.out)->required();
  ovl->add_option("--alpha", oa.alpha)->capture_default_str();
  ovl->add_option("--color", oa.color, "RRGGBB")->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic dataset");
  synth->add_option("--out", sa.out)->required();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("--count", sa.count)->capture_default_str();
  synth->add_option("--size", sa.size, "Image side in pixels")->capture_default_str();

  InitArgs ia;
  auto* init = app.add_subcommand("init-weights", "Write seeded random (or zero) weights");
  init->add_option("--config", ia.config, "Config file (defaults if omitted)");
  init->add_option("--seed", ia.seed)->capture_default_str();
  init->add_flag("--zero", ia.zero, "All-zero kernels, identity batch norm");
  init->add_option("--out", ia.out)->required();
  init->add_option("--write-config", ia.write_config, "Also write the effective config");

  std::vector<std::string> argv_store{"lungseg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*eval) return do_eval(ev, out, err);
    if (*post) return do_post(pa, out, err);
    if (*fwd) return do_forward(fa, out);
    if (*ovl) return do_overlay(oa, out);
    if (*synth) {
      const auto ids = generate_fixtures(sa.out, sa.seed, sa.count, sa.size);
      out << "wrote " << ids.size() << " cases to " << sa.out << "\n";
      return kExitOk;
    }
    if (*init) return do_init(ia, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace lungseg::cli
