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

#include "lungseg/mask.hpp"

#include <algorithm>

#include "lungseg/errors.hpp"

namespace lungseg {

BinaryMask::BinaryMask(std::size_t height, std::size_t width)
    : height_(height), width_(width), bits_(height * width, 0) {
  if (height == 0 || width == 0) throw ContractError("mask dimensions must be positive");
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  if (height == 0 || width == 0) throw ContractError("mask dimensions must be positive");
  if (bits_.size() != height * width) {
    throw ContractError("mask bit count " + std::to_string(bits_.size()) + " does not match " +
                        shape_string());
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BinaryMask::shape_string() const {
  return std::to_string(height_) + "x" + std::to_string(width_);
}

}  // namespace lungseg
