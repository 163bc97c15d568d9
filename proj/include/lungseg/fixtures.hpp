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
#include <string>
#include <vector>

#include "lungseg/image_io.hpp"
#include "lungseg/mask.hpp"

namespace lungseg {

/// One synthetic case: a noisy gray "radiograph" with two bright elliptical lungs, the exact
/// two-ellipse mask, and a prediction that perturbs the ellipses and adds small fragments
/// disjoint from (and not touching) everything else.
struct Fixture {
  GrayImage image;
  BinaryMask gt;
  BinaryMask pred;
};

inline constexpr std::size_t kDefaultFixtureSize = 64;
inline constexpr std::size_t kMinFixtureSize = 32;

/// Deterministic in (seed, index, size).
Fixture make_fixture(std::uint64_t seed, std::size_t index, std::size_t size = kDefaultFixtureSize);

std::string fixture_id(std::size_t index);

/// Writes <out>/images/<id>.png, <out>/gt/<id>.png and <out>/pred/<id>.png for `count` cases.
/// Same arguments produce byte-identical files. Returns the ids.
std::vector<std::string> generate_fixtures(const std::filesystem::path& out_dir,
                                           std::uint64_t seed, std::size_t count,
                                           std::size_t size = kDefaultFixtureSize);

}  // namespace lungseg
