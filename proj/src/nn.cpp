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

#include "lungseg/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lungseg/errors.hpp"

namespace lungseg {

KernelBank::KernelBank(std::size_t out, std::size_t in, std::size_t kh, std::size_t kw)
    : out_channels(out), in_channels(in), k_h(kh), k_w(kw),
      weights(out * in * kh * kw, 0.0), bias(out, 0.0) {}

void KernelBank::validate() const {
  if (out_channels == 0 || in_channels == 0 || k_h == 0 || k_w == 0) {
    throw ConfigError("kernel bank dimensions must be positive");
  }
  if (k_h % 2 == 0 || k_w % 2 == 0) {
    throw ConfigError("kernel size must be odd, got " + std::to_string(k_h) + "x" +
                      std::to_string(k_w));
  }
  if (weights.size() != out_channels * in_channels * k_h * k_w) {
    throw ConfigError("kernel weight length " + std::to_string(weights.size()) +
                      " does not match declared shape");
  }
  if (bias.size() != out_channels) {
    throw ConfigError("kernel bias length " + std::to_string(bias.size()) +
                      " does not match out_channels " + std::to_string(out_channels));
  }
}

BnParams::BnParams(std::size_t channels, double eps)
    : gamma(channels, 1.0), beta(channels, 0.0), running_mean(channels, 0.0),
      running_var(channels, 1.0), epsilon(eps) {}

Tensor conv2d(const Tensor& x, const KernelBank& k) { return conv2d_strided(x, k, 1); }

Tensor conv2d_strided(const Tensor& x, const KernelBank& k, std::size_t stride) {
  k.validate();
  if (stride == 0) throw ConfigError("convolution stride must be positive");
  if (x.channels() != k.in_channels) {
    throw ContractError("conv2d: input has " + std::to_string(x.channels()) +
                        " channels, kernel expects " + std::to_string(k.in_channels));
  }
  const auto H = static_cast<std::ptrdiff_t>(x.height());
  const auto W = static_cast<std::ptrdiff_t>(x.width());
  const auto pad_y = static_cast<std::ptrdiff_t>(k.k_h / 2);
  const auto pad_x = static_cast<std::ptrdiff_t>(k.k_w / 2);
  const auto s = static_cast<std::ptrdiff_t>(stride);
  const std::ptrdiff_t OH = (H + s - 1) / s;
  const std::ptrdiff_t OW = (W + s - 1) / s;

  Tensor out(k.out_channels, static_cast<std::size_t>(OH), static_cast<std::size_t>(OW));
  for (std::size_t o = 0; o < k.out_channels; ++o) {
    auto dst = out.plane(o);
    std::fill(dst.begin(), dst.end(), k.bias[o]);
    for (std::size_t ic = 0; ic < k.in_channels; ++ic) {
      const auto src = x.plane(ic);
      for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(k.k_h); ++ky) {
        for (std::ptrdiff_t kx = 0; kx < static_cast<std::ptrdiff_t>(k.k_w); ++kx) {
          const double wv = k.w(o, ic, static_cast<std::size_t>(ky), static_cast<std::size_t>(kx));
          if (wv == 0.0) continue;
          const std::ptrdiff_t dy = ky - pad_y;
          const std::ptrdiff_t dx = kx - pad_x;
          // Output columns j with 0 <= j*s + dx < W.
          const std::ptrdiff_t j_lo = dx >= 0 ? 0 : (-dx + s - 1) / s;
          const std::ptrdiff_t j_hi = std::min(OW, (W - dx + s - 1) / s);
          for (std::ptrdiff_t i = 0; i < OH; ++i) {
            const std::ptrdiff_t yy = i * s + dy;
            if (yy < 0 || yy >= H) continue;
            const double* row = src.data() + yy * W;
            double* orow = dst.data() + i * OW;
            for (std::ptrdiff_t j = j_lo; j < j_hi; ++j) {
              orow[j] += wv * row[j * s + dx];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data()) v = std::max(v, 0.0);
  return out;
}

Tensor batch_norm(const Tensor& x, const BnParams& p) {
  const std::size_t C = x.channels();
  if (p.gamma.size() != C || p.beta.size() != C || p.running_mean.size() != C ||
      p.running_var.size() != C) {
    throw ContractError("batch_norm: parameter lengths (" + std::to_string(p.gamma.size()) + ", " +
                        std::to_string(p.beta.size()) + ", " +
                        std::to_string(p.running_mean.size()) + ", " +
                        std::to_string(p.running_var.size()) + ") do not match " +
                        std::to_string(C) + " channels");
  }
  if (!(p.epsilon >= 0.0)) throw ConfigError("batch_norm: epsilon must be non-negative");
  Tensor out = x;
  for (std::size_t c = 0; c < C; ++c) {
    const double denom = p.running_var[c] + p.epsilon;
    if (p.running_var[c] < 0.0 || !(denom > 0.0)) {
      throw ConfigError("batch_norm: channel " + std::to_string(c) +
                        " has non-positive variance + epsilon");
    }
    const double scale = p.gamma[c] / std::sqrt(denom);
    const double mean = p.running_mean[c];
    const double shift = p.beta[c];
    for (double& v : out.plane(c)) v = scale * (v - mean) + shift;
  }
  return out;
}

Tensor upsample_nearest(const Tensor& x, std::size_t factor) {
  if (factor == 0) throw ConfigError("upsample factor must be >= 1");
  const std::size_t H = x.height(), W = x.width();
  Tensor out(x.channels(), H * factor, W * factor);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t y = 0; y < H * factor; ++y) {
      for (std::size_t xx = 0; xx < W * factor; ++xx) {
        out.at(c, y, xx) = x.at(c, y / factor, xx / factor);
      }
    }
  }
  return out;
}

Tensor softmax_channels(const Tensor& x) {
  const std::size_t C = x.channels();
  if (C < 2) {
    throw ConfigError("softmax_channels needs at least 2 channels, got " + std::to_string(C));
  }
  Tensor out(C, x.height(), x.width());
  const std::size_t n = x.plane_size();
  for (std::size_t p = 0; p < n; ++p) {
    double m = x.plane(0)[p];
    for (std::size_t c = 1; c < C; ++c) m = std::max(m, x.plane(c)[p]);
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      const double e = std::exp(x.plane(c)[p] - m);
      out.plane(c)[p] = e;
      sum += e;
    }
    for (std::size_t c = 0; c < C; ++c) out.plane(c)[p] /= sum;
  }
  return out;
}

LabelImage argmax_channels(const Tensor& x) {
  if (x.channels() == 0) throw ContractError("argmax_channels on an empty tensor");
  LabelImage out(x.height(), x.width());
  const std::size_t n = x.plane_size();
  for (std::size_t p = 0; p < n; ++p) {
    std::uint32_t best = 0;
    double best_v = x.plane(0)[p];
    for (std::size_t c = 1; c < x.channels(); ++c) {
      if (x.plane(c)[p] > best_v) {
        best_v = x.plane(c)[p];
        best = static_cast<std::uint32_t>(c);
      }
    }
    out.labels[p] = best;
  }
  return out;
}

}  // namespace lungseg
