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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "lungseg/components.hpp"
#include "lungseg/decoder.hpp"
#include "lungseg/errors.hpp"
#include "lungseg/fixtures.hpp"
#include "lungseg/harness.hpp"
#include "lungseg/image_io.hpp"
#include "lungseg/metrics.hpp"
#include "lungseg/nn.hpp"
#include "lungseg/weights.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace lungseg {

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const F64Array& a) {
  if (a.ndim() != 3) throw py::value_error("expected a (channels, height, width) array");
  const auto c = static_cast<std::size_t>(a.shape(0)), h = static_cast<std::size_t>(a.shape(1)),
             w = static_cast<std::size_t>(a.shape(2));
  return Tensor(c, h, w, std::vector<double>(a.data(), a.data() + a.size()));
}

F64Array from_tensor(const Tensor& t) {
  F64Array out({t.channels(), t.height(), t.width()});
  std::memcpy(out.mutable_data(), t.data().data(), t.size() * sizeof(double));
  return out;
}

BinaryMask to_mask(const BoolArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a (height, width) mask");
  std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
  return BinaryMask(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                    std::move(bits));
}

BoolArray from_mask(const BinaryMask& m) {
  BoolArray out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) dst[i] = m[i];
  return out;
}

KernelBank make_kernel(const F64Array& weights, const F64Array& bias) {
  if (weights.ndim() != 4) throw py::value_error("kernel weights must be (out, in, kh, kw)");
  KernelBank k(static_cast<std::size_t>(weights.shape(0)), static_cast<std::size_t>(weights.shape(1)),
               static_cast<std::size_t>(weights.shape(2)), static_cast<std::size_t>(weights.shape(3)));
  k.weights.assign(weights.data(), weights.data() + weights.size());
  k.bias.assign(bias.data(), bias.data() + bias.size());
  return k;
}

std::vector<double> vec(const F64Array& a) { return {a.data(), a.data() + a.size()}; }

}  // namespace

}  // namespace lungseg

PYBIND11_MODULE(_lungseg, m) {
  using namespace lungseg;
  m.doc() = "Lung mask segmentation: decoder inference, component post-processing, Dice/IoU";

  auto base = py::register_exception<Error>(m, "LungsegError", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InputShapeError>(m, "InputShapeError", base.ptr());
  auto io = py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", io.ptr());
  auto parse = py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", parse.ptr());
  py::register_exception<TruncatedError>(m, "TruncatedError", parse.ptr());
  py::register_exception<ShapeMismatchError>(m, "ShapeMismatchError", parse.ptr());

  // nn primitives
  m.def("conv2d", [](const F64Array& x, const F64Array& w, const F64Array& b) {
    return from_tensor(conv2d(to_tensor(x), make_kernel(w, b)));
  }, "x"_a, "weights"_a, "bias"_a);
  m.def("relu", [](const F64Array& x) { return from_tensor(relu(to_tensor(x))); });
  m.def("batch_norm", [](const F64Array& x, const F64Array& gamma, const F64Array& beta,
                         const F64Array& mean, const F64Array& var, double eps) {
    BnParams p;
    p.gamma = vec(gamma);
    p.beta = vec(beta);
    p.running_mean = vec(mean);
    p.running_var = vec(var);
    p.epsilon = eps;
    return from_tensor(batch_norm(to_tensor(x), p));
  }, "x"_a, "gamma"_a, "beta"_a, "mean"_a, "var"_a, "epsilon"_a = kDefaultBnEpsilon);
  m.def("upsample_nearest", [](const F64Array& x, std::size_t f) {
    return from_tensor(upsample_nearest(to_tensor(x), f));
  }, "x"_a, "factor"_a);
  m.def("softmax_channels", [](const F64Array& x) { return from_tensor(softmax_channels(to_tensor(x))); });
  m.def("argmax_channels", [](const F64Array& x) {
    const LabelImage l = argmax_channels(to_tensor(x));
    py::array_t<std::uint32_t> out({l.height, l.width});
    std::memcpy(out.mutable_data(), l.labels.data(), l.labels.size() * sizeof(std::uint32_t));
    return out;
  });

  // network
  py::class_<DecoderConfig>(m, "DecoderConfig")
      .def(py::init<>())
      .def_readwrite("num_blocks", &DecoderConfig::num_blocks)
      .def_readwrite("block_channels", &DecoderConfig::block_channels)
      .def_readwrite("kernel_size", &DecoderConfig::kernel_size)
      .def_readwrite("upsample_factor", &DecoderConfig::upsample_factor)
      .def_readwrite("num_classes", &DecoderConfig::num_classes)
      .def_readwrite("encoder_channels", &DecoderConfig::encoder_channels)
      .def_readwrite("encoder_downsample", &DecoderConfig::encoder_downsample)
      .def_readwrite("image_channels", &DecoderConfig::image_channels)
      .def_readwrite("bn_epsilon", &DecoderConfig::bn_epsilon)
      .def("validate", &DecoderConfig::validate)
      .def("to_text", [](const DecoderConfig& c) { return format_config(c); })
      .def_static("from_text", &parse_config)
      .def_static("load", [](const std::filesystem::path& p) { return load_config(p); });

  py::class_<WeightStore>(m, "WeightStore")
      .def_static("zeros", &zero_weights, "config"_a)
      .def_static("random", &random_weights, "config"_a, "seed"_a)
      .def_static("load", &load_weights, "path"_a, "config"_a)
      .def("save", [](const WeightStore& w, const std::filesystem::path& p) { save_weights(w, p); })
      .def("__eq__", [](const WeightStore& a, const WeightStore& b) { return a == b; });

  m.def("forward", [](const F64Array& image, const WeightStore& w, const DecoderConfig& c) {
    Tensor t = to_tensor(image);
    Tensor p;
    {
      py::gil_scoped_release release;
      p = forward(t, w, c);
    }
    return from_tensor(p);
  }, "image"_a, "weights"_a, "config"_a);
  m.def("predict_mask", [](const F64Array& prob, std::size_t lung_class) {
    return from_mask(predict_mask(to_tensor(prob), lung_class));
  }, "prob"_a, "lung_class"_a = 1);

  // post-processing
  m.def("label_components", [](const BoolArray& mask, int connectivity) {
    const Components cc = label_components(to_mask(mask), connectivity_from_int(connectivity));
    py::array_t<std::uint32_t> labels({cc.labels.height, cc.labels.width});
    std::memcpy(labels.mutable_data(), cc.labels.labels.data(),
                cc.labels.labels.size() * sizeof(std::uint32_t));
    py::list stats;
    for (const auto& s : cc.stats) {
      stats.append(py::dict("label"_a = s.label, "area"_a = s.area,
                            "bbox"_a = py::make_tuple(s.bbox.left, s.bbox.top, s.bbox.width, s.bbox.height),
                            "centroid"_a = py::make_tuple(s.centroid_x, s.centroid_y)));
    }
    return py::make_tuple(labels, stats);
  }, "mask"_a, "connectivity"_a = 8);
  m.def("keep_largest_k", [](const BoolArray& mask, std::size_t k, int connectivity) {
    return from_mask(keep_largest_k(to_mask(mask), k, connectivity_from_int(connectivity)));
  }, "mask"_a, "k"_a = kDefaultKeep, "connectivity"_a = 8);
  m.def("post_process", [](const F64Array& prob, std::size_t lung_class, double threshold,
                           std::size_t k, int connectivity) {
    return from_mask(post_process(to_tensor(prob), lung_class, threshold, k,
                                  connectivity_from_int(connectivity)));
  }, "prob"_a, "lung_class"_a = 1, "threshold"_a = kDefaultProbThreshold, "k"_a = kDefaultKeep,
        "connectivity"_a = 8);

  // metrics
  m.def("overlap_counts", [](const BoolArray& pred, const BoolArray& gt) {
    const OverlapCounts c = overlap_counts(to_mask(pred), to_mask(gt));
    return py::dict("tp"_a = c.tp, "fp"_a = c.fp, "fn"_a = c.fn, "tn"_a = c.tn);
  }, "pred"_a, "gt"_a);
  m.def("dice", [](const BoolArray& pred, const BoolArray& gt) {
    return dice(to_mask(pred), to_mask(gt));
  }, "pred"_a, "gt"_a);
  m.def("iou", [](const BoolArray& pred, const BoolArray& gt) {
    return iou(to_mask(pred), to_mask(gt));
  }, "pred"_a, "gt"_a);

  // io + harness
  m.def("read_mask", [](const std::filesystem::path& p, std::uint8_t threshold) {
    return from_mask(read_mask(p, threshold));
  }, "path"_a, "threshold"_a = kDefaultMaskThreshold);
  m.def("write_mask", [](const BoolArray& mask, const std::filesystem::path& p) {
    write_mask(to_mask(mask), p);
  }, "mask"_a, "path"_a);
  m.def("generate_fixtures", &generate_fixtures, "out_dir"_a, "seed"_a, "count"_a,
        "size"_a = kDefaultFixtureSize);
  m.def("evaluate", [](const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                       bool post, std::size_t k, int connectivity, std::size_t jobs) {
    EvalOptions o;
    o.pred_dir = pred_dir;
    o.gt_dir = gt_dir;
    o.post = post;
    o.k = k;
    o.connectivity = connectivity_from_int(connectivity);
    o.jobs = jobs;
    const EvalReport r = run_eval(o);
    return py::make_tuple(format_csv(r), format_json(r));
  }, "pred_dir"_a, "gt_dir"_a, "post"_a = false, "k"_a = kDefaultKeep, "connectivity"_a = 8,
        "jobs"_a = 1, "Returns (csv_text, json_text).");
}
