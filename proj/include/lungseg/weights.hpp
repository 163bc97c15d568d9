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

#include <filesystem>

#include "lungseg/decoder.hpp"

namespace lungseg {

// SEGW weight file, all integers little-endian:
//   "SEGW" | u16 version | u32 record count
//   per record: u16 name length | name bytes | u8 rank | u32 dims[rank]
//   f32 payloads, concatenated in record order.
//
// Record order: encoder.<s>.weight/.bias for each stub stage, then
// block.<b>.conv.weight, .conv.bias, .bn.gamma, .bn.beta, .bn.mean, .bn.var for each
// block, then classifier.weight, classifier.bias.

inline constexpr std::uint16_t kWeightFormatVersion = 1;

void save_weights(const WeightStore& w, const std::filesystem::path& path);

/// Validates magic, version and every record shape against `c` before reading any payload.
/// Throws FormatError, TruncatedError or ShapeMismatchError; never returns a partial store.
WeightStore load_weights(const std::filesystem::path& path, const DecoderConfig& c);

}  // namespace lungseg
