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
#include <vector>

#include "lungseg/tensor.hpp"

namespace lungseg {

/// Convolution weights laid out as [out][in][k_h][k_w] plus one bias per output channel.
struct KernelBank {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t k_h = 0;
  std::size_t k_w = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  KernelBank() = default;
  KernelBank(std::size_t out, std::size_t in, std::size_t kh, std::size_t kw);

  double& w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
    return weights[((o * in_channels + i) * k_h + ky) * k_w + kx];
  }
  double w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
    return weights[((o * in_channels + i) * k_h + ky) * k_w + kx];
  }

  /// Throws ConfigError on even kernel sizes or inconsistent buffer lengths.
  void validate() const;

  friend bool operator==(const KernelBank&, const KernelBank&) = default;
};

inline constexpr double kDefaultBnEpsilon = 1e-3;

/// Inference-mode batch normalization parameters, one entry per channel.
struct BnParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = kDefaultBnEpsilon;

  BnParams() = default;
  /// Identity normalization (gamma 1, beta 0, mean 0, var 1) for `channels` channels.
  BnParams(std::size_t channels, double eps = kDefaultBnEpsilon);

  std::size_t channels() const { return gamma.size(); }

  friend bool operator==(const BnParams&, const BnParams&) = default;
};

/// Per-pixel integer labels, row-major.
struct LabelImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> labels;

  LabelImage() = default;
  LabelImage(std::size_t h, std::size_t w) : height(h), width(w), labels(h * w, 0) {}

  std::uint32_t& at(std::size_t y, std::size_t x) { return labels[y * width + x]; }
  std::uint32_t at(std::size_t y, std::size_t x) const { return labels[y * width + x]; }

  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

// Layer primitives. All are pure: inputs are never modified.

/// Stride-1 convolution with zero same-padding. Output keeps the input's spatial size.
Tensor conv2d(const Tensor& x, const KernelBank& k);

/// Convolution with zero padding k/2 and the given stride; output is ceil(H/stride) x ceil(W/stride).
/// conv2d(x, k) == conv2d_strided(x, k, 1).
Tensor conv2d_strided(const Tensor& x, const KernelBank& k, std::size_t stride);

Tensor relu(const Tensor& x);

/// gamma * (v - mean) / sqrt(var + eps) + beta, per channel.
Tensor batch_norm(const Tensor& x, const BnParams& p);

/// Replicates each pixel into a factor x factor block.
Tensor upsample_nearest(const Tensor& x, std::size_t factor);

/// Numerically stable softmax across channels at each pixel. Needs >= 2 channels.
Tensor softmax_channels(const Tensor& x);

/// Index of the largest channel at each pixel; ties go to the lowest index.
LabelImage argmax_channels(const Tensor& x);

}  // namespace lungseg
