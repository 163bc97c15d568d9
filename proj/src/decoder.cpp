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

#include "lungseg/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <sstream>
#include <thread>

#include "lungseg/errors.hpp"
#include "rng.hpp"

namespace lungseg {

namespace {

constexpr std::size_t kEncoderKernel = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size() || value.front() == '-') {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value +
                      "'");
  }
  return static_cast<std::size_t>(v);
}

std::string shape_str(const KernelBank& k) {
  return std::to_string(k.out_channels) + "x" + std::to_string(k.in_channels) + "x" +
         std::to_string(k.k_h) + "x" + std::to_string(k.k_w);
}

void check_bank(const KernelBank& k, std::size_t out, std::size_t in, std::size_t ks,
                const std::string& layer) {
  if (k.out_channels != out || k.in_channels != in || k.k_h != ks || k.k_w != ks ||
      k.weights.size() != out * in * ks * ks || k.bias.size() != out) {
    throw ConfigError("weights/config mismatch at " + layer + ": kernel is " + shape_str(k) +
                      ", config expects " + std::to_string(out) + "x" + std::to_string(in) + "x" +
                      std::to_string(ks) + "x" + std::to_string(ks));
  }
}

float to_f32(double v) { return static_cast<float>(v); }

void fill_bank(KernelBank& k, detail::Rng& rng) {
  const double fan_in = static_cast<double>(k.in_channels * k.k_h * k.k_w);
  const double a = std::sqrt(6.0 / fan_in);
  for (double& v : k.weights) v = to_f32(rng.uniform(-a, a));
  for (double& v : k.bias) v = to_f32(rng.uniform(-0.05, 0.05));
}

}  // namespace

void DecoderConfig::validate() const {
  if (num_blocks != block_channels.size()) {
    throw ConfigError("num_blocks (" + std::to_string(num_blocks) +
                      ") must equal the length of block_channels (" +
                      std::to_string(block_channels.size()) + ")");
  }
  if (std::find(block_channels.begin(), block_channels.end(), 0u) != block_channels.end()) {
    throw ConfigError("block_channels entries must be positive");
  }
  if (kernel_size == 0 || kernel_size % 2 == 0) {
    throw ConfigError("kernel_size must be odd, got " + std::to_string(kernel_size));
  }
  if (upsample_factor == 0) throw ConfigError("upsample_factor must be >= 1");
  if (num_classes < 2) {
    throw ConfigError("num_classes must be >= 2, got " + std::to_string(num_classes));
  }
  if (encoder_channels == 0) throw ConfigError("encoder_channels must be positive");
  if (image_channels != 1 && image_channels != 3) {
    throw ConfigError("image_channels must be 1 or 3, got " + std::to_string(image_channels));
  }
  if (encoder_downsample == 0 || !std::has_single_bit(encoder_downsample)) {
    throw ConfigError("encoder_downsample must be a power of two, got " +
                      std::to_string(encoder_downsample));
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < num_blocks; ++i) total *= upsample_factor;
  if (total != encoder_downsample) {
    throw ConfigError("upsample_factor^num_blocks (" + std::to_string(total) +
                      ") must equal encoder_downsample (" + std::to_string(encoder_downsample) +
                      ")");
  }
  if (!(bn_epsilon > 0.0)) throw ConfigError("bn_epsilon must be positive");
}

std::size_t DecoderConfig::encoder_stages() const {
  return encoder_downsample <= 1 ? 1 : static_cast<std::size_t>(std::countr_zero(encoder_downsample));
}

std::size_t DecoderConfig::encoder_stage_channels(std::size_t s) const {
  const std::size_t shift = encoder_stages() - 1 - s;
  return std::max<std::size_t>(1, shift >= 64 ? 0 : encoder_channels >> shift);
}

std::size_t DecoderConfig::block_in_channels(std::size_t b) const {
  return b == 0 ? encoder_channels : block_channels[b - 1];
}

DecoderConfig parse_config(const std::string& text) {
  DecoderConfig c;
  bool saw_num_blocks = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "num_blocks") {
      c.num_blocks = parse_count(key, value);
      saw_num_blocks = true;
    } else if (key == "block_channels") {
      c.block_channels.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) c.block_channels.push_back(parse_count(key, trim(item)));
    } else if (key == "kernel_size") {
      c.kernel_size = parse_count(key, value);
    } else if (key == "upsample_factor") {
      c.upsample_factor = parse_count(key, value);
    } else if (key == "num_classes") {
      c.num_classes = parse_count(key, value);
    } else if (key == "encoder_channels") {
      c.encoder_channels = parse_count(key, value);
    } else if (key == "encoder_downsample") {
      c.encoder_downsample = parse_count(key, value);
    } else if (key == "image_channels") {
      c.image_channels = parse_count(key, value);
    } else if (key == "bn_epsilon") {
      try {
        std::size_t pos = 0;
        c.bn_epsilon = std::stod(value, &pos);
        if (pos != value.size()) throw ConfigError("");
      } catch (const std::exception&) {
        throw ConfigError("config key 'bn_epsilon': expected a real number, got '" + value + "'");
      }
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!saw_num_blocks) c.num_blocks = c.block_channels.size();
  c.validate();
  return c;
}

DecoderConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const DecoderConfig& c) {
  std::ostringstream out;
  out << "num_blocks = " << c.num_blocks << "\n";
  out << "block_channels = ";
  for (std::size_t i = 0; i < c.block_channels.size(); ++i) {
    out << (i ? ", " : "") << c.block_channels[i];
  }
  out << "\nkernel_size = " << c.kernel_size << "\n";
  out << "upsample_factor = " << c.upsample_factor << "\n";
  out << "num_classes = " << c.num_classes << "\n";
  out << "encoder_channels = " << c.encoder_channels << "\n";
  out << "encoder_downsample = " << c.encoder_downsample << "\n";
  out << "image_channels = " << c.image_channels << "\n";
  out.precision(17);
  out << "bn_epsilon = " << c.bn_epsilon << "\n";
  return out.str();
}

WeightStore zero_weights(const DecoderConfig& c) {
  c.validate();
  WeightStore w;
  std::size_t in = c.image_channels;
  for (std::size_t s = 0; s < c.encoder_stages(); ++s) {
    const std::size_t out = c.encoder_stage_channels(s);
    w.encoder.emplace_back(out, in, kEncoderKernel, kEncoderKernel);
    in = out;
  }
  for (std::size_t b = 0; b < c.num_blocks; ++b) {
    w.blocks.push_back({KernelBank(c.block_channels[b], c.block_in_channels(b), c.kernel_size,
                                   c.kernel_size),
                        BnParams(c.block_channels[b], c.bn_epsilon)});
  }
  w.classifier = KernelBank(c.num_classes, c.block_channels.back(), 1, 1);
  return w;
}

WeightStore random_weights(const DecoderConfig& c, std::uint64_t seed) {
  WeightStore w = zero_weights(c);
  detail::Rng rng(seed);
  for (auto& k : w.encoder) fill_bank(k, rng);
  for (auto& b : w.blocks) {
    fill_bank(b.conv, rng);
    for (double& v : b.bn.gamma) v = to_f32(rng.uniform(0.8, 1.2));
    for (double& v : b.bn.beta) v = to_f32(rng.uniform(-0.1, 0.1));
    for (double& v : b.bn.running_mean) v = to_f32(rng.uniform(-0.1, 0.1));
    for (double& v : b.bn.running_var) v = to_f32(rng.uniform(0.5, 1.5));
  }
  fill_bank(w.classifier, rng);
  return w;
}

void check_weights(const WeightStore& w, const DecoderConfig& c) {
  c.validate();
  if (w.encoder.size() != c.encoder_stages()) {
    throw ConfigError("weights/config mismatch at encoder: " + std::to_string(w.encoder.size()) +
                      " stages, config expects " + std::to_string(c.encoder_stages()));
  }
  std::size_t in = c.image_channels;
  for (std::size_t s = 0; s < w.encoder.size(); ++s) {
    const std::size_t out = c.encoder_stage_channels(s);
    check_bank(w.encoder[s], out, in, kEncoderKernel, "encoder " + std::to_string(s));
    in = out;
  }
  if (w.blocks.size() != c.num_blocks) {
    throw ConfigError("weights/config mismatch at decoder: " + std::to_string(w.blocks.size()) +
                      " blocks, config expects " + std::to_string(c.num_blocks));
  }
  for (std::size_t b = 0; b < c.num_blocks; ++b) {
    const std::string layer = "block " + std::to_string(b);
    check_bank(w.blocks[b].conv, c.block_channels[b], c.block_in_channels(b), c.kernel_size, layer);
    const auto& bn = w.blocks[b].bn;
    const std::size_t ch = c.block_channels[b];
    if (bn.gamma.size() != ch || bn.beta.size() != ch || bn.running_mean.size() != ch ||
        bn.running_var.size() != ch) {
      throw ConfigError("weights/config mismatch at " + layer + ": batch norm expects " +
                        std::to_string(ch) + " channels");
    }
  }
  check_bank(w.classifier, c.num_classes, c.block_channels.back(), 1, "classifier");
}

Tensor encoder_stub(const Tensor& image, const WeightStore& w, const DecoderConfig& c) {
  c.validate();
  const std::size_t d = c.encoder_downsample;
  if (image.height() % d != 0 || image.width() % d != 0) {
    throw InputShapeError("input " + std::to_string(image.height()) + "x" +
                          std::to_string(image.width()) +
                          ": height and width must be a multiple of " + std::to_string(d));
  }
  if (image.channels() != c.image_channels) {
    throw InputShapeError("input has " + std::to_string(image.channels()) +
                          " channels, config expects " + std::to_string(c.image_channels));
  }
  if (w.encoder.size() != c.encoder_stages()) {
    throw ConfigError("weights/config mismatch at encoder: wrong number of stages");
  }
  Tensor x = image;
  for (const auto& stage : w.encoder) x = relu(conv2d_strided(x, stage, c.encoder_stage_stride()));
  return x;
}

Tensor decoder_block(const Tensor& x, const DecoderBlockWeights& block, const DecoderConfig& c) {
  if (x.channels() != block.conv.in_channels) {
    throw ContractError("decoder_block: input has " + std::to_string(x.channels()) +
                        " channels, block expects " + std::to_string(block.conv.in_channels));
  }
  return batch_norm(relu(conv2d(upsample_nearest(x, c.upsample_factor), block.conv)), block.bn);
}

Tensor forward(const Tensor& image, const WeightStore& w, const DecoderConfig& c) {
  check_weights(w, c);
  Tensor x = encoder_stub(image, w, c);
  for (const auto& block : w.blocks) x = decoder_block(x, block, c);
  return softmax_channels(conv2d(x, w.classifier));
}

std::vector<Tensor> forward_batch(std::span<const Tensor> images, const WeightStore& w,
                                  const DecoderConfig& c, std::size_t jobs) {
  check_weights(w, c);
  std::vector<Tensor> out(images.size());
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(images.size(), 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < images.size(); ++i) out[i] = forward(images[i], w, c);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(images.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < images.size(); i = next++) {
          try {
            out[i] = forward(images[i], w, c);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

BinaryMask predict_mask(const Tensor& prob, std::size_t lung_class) {
  if (lung_class >= prob.channels()) {
    throw ConfigError("lung_class " + std::to_string(lung_class) + " out of range for " +
                      std::to_string(prob.channels()) + " classes");
  }
  const LabelImage labels = argmax_channels(prob);
  std::vector<std::uint8_t> bits(labels.labels.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = labels.labels[i] == lung_class ? 1 : 0;
  return BinaryMask(prob.height(), prob.width(), std::move(bits));
}

}  // namespace lungseg
