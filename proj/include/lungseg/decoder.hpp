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
#include <span>
#include <string>
#include <vector>

#include "lungseg/mask.hpp"
#include "lungseg/nn.hpp"
#include "lungseg/tensor.hpp"

namespace lungseg {

/// Architecture hyperparameters of the encoder stub + upsampling decoder.
///
/// The encoder stub is a stack of 3x3 stride-2 convolutions with ReLU that reduces
/// resolution by `encoder_downsample`; each decoder block multiplies it back by
/// `upsample_factor`, so upsample_factor^num_blocks must equal encoder_downsample.
struct DecoderConfig {
  std::size_t num_blocks = 4;
  std::vector<std::size_t> block_channels{256, 128, 64, 32};
  std::size_t kernel_size = 3;
  std::size_t upsample_factor = 2;
  std::size_t num_classes = 2;
  std::size_t encoder_channels = 512;
  std::size_t encoder_downsample = 16;
  std::size_t image_channels = 1;
  double bn_epsilon = kDefaultBnEpsilon;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  /// Number of stride-2 stages in the encoder stub (1 stride-1 stage when downsample is 1).
  std::size_t encoder_stages() const;
  std::size_t encoder_stage_stride() const { return encoder_downsample == 1 ? 1 : 2; }
  /// Output channels of encoder stage `s`; the last stage emits encoder_channels.
  std::size_t encoder_stage_channels(std::size_t s) const;
  std::size_t block_in_channels(std::size_t b) const;

  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

/// Parses the flat `key = value` config format. Unknown keys are rejected.
DecoderConfig parse_config(const std::string& text);
DecoderConfig load_config(const std::filesystem::path& path);
std::string format_config(const DecoderConfig& c);

struct DecoderBlockWeights {
  KernelBank conv;
  BnParams bn;

  friend bool operator==(const DecoderBlockWeights&, const DecoderBlockWeights&) = default;
};

/// Learned parameters of the whole network. Immutable once built or loaded.
struct WeightStore {
  std::vector<KernelBank> encoder;
  std::vector<DecoderBlockWeights> blocks;
  KernelBank classifier;  // 1x1, last block channels -> num_classes

  friend bool operator==(const WeightStore&, const WeightStore&) = default;
};

/// All-zero kernels and identity batch-norm statistics with the config's shapes.
WeightStore zero_weights(const DecoderConfig& c);

/// Seeded random weights (He-scaled kernels, mild BN statistics). Every value is
/// exactly representable as a 32-bit float, so they survive a save/load cycle.
WeightStore random_weights(const DecoderConfig& c, std::uint64_t seed);

/// Checks every layer shape against the config; throws ConfigError naming the first
/// inconsistent layer (e.g. "block 2").
void check_weights(const WeightStore& w, const DecoderConfig& c);

Tensor encoder_stub(const Tensor& image, const WeightStore& w, const DecoderConfig& c);

/// upsample -> conv -> relu -> batch norm.
Tensor decoder_block(const Tensor& x, const DecoderBlockWeights& block, const DecoderConfig& c);

/// Full pass: encoder stub, decoder blocks, 1x1 classifier, channel softmax.
/// Returns num_classes x H x W probabilities.
Tensor forward(const Tensor& image, const WeightStore& w, const DecoderConfig& c);

/// Runs forward on every image using up to `jobs` threads. Results are in input order and
/// bit-identical to sequential calls.
std::vector<Tensor> forward_batch(std::span<const Tensor> images, const WeightStore& w,
                                  const DecoderConfig& c, std::size_t jobs);

/// Foreground where the argmax class equals lung_class.
BinaryMask predict_mask(const Tensor& prob, std::size_t lung_class);

}  // namespace lungseg
