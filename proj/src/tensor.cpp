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

#include "lungseg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

void check_dims(std::size_t c, std::size_t h, std::size_t w) {
  if (c == 0 || h == 0 || w == 0) {
    throw ContractError("tensor dimensions must be positive, got " + std::to_string(c) + "x" +
                        std::to_string(h) + "x" + std::to_string(w));
  }
}

}  // namespace

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(channels * height * width, fill);
}

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  check_dims(channels, height, width);
  if (data_.size() != channels * height * width) {
    throw ContractError("tensor data length " + std::to_string(data_.size()) +
                        " does not match shape " + std::to_string(channels) + "x" +
                        std::to_string(height) + "x" + std::to_string(width));
  }
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace lungseg
