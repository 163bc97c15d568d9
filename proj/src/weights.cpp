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

#include "lungseg/weights.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "lungseg/errors.hpp"

namespace lungseg {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'E', 'G', 'W'};

struct Record {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<double>* values = nullptr;        // save: source; load: destination
  const std::vector<double>* cvalues = nullptr;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

std::vector<std::uint32_t> dims_of(const KernelBank& k) {
  return {static_cast<std::uint32_t>(k.out_channels), static_cast<std::uint32_t>(k.in_channels),
          static_cast<std::uint32_t>(k.k_h), static_cast<std::uint32_t>(k.k_w)};
}

// Builds the record table for a store. Names and order define the file layout.
template <typename Store>
std::vector<Record> records_of(Store& w) {
  std::vector<Record> r;
  auto add = [&r](std::string name, std::vector<std::uint32_t> dims, auto& values) {
    Record rec{std::move(name), std::move(dims)};
    if constexpr (std::is_const_v<std::remove_reference_t<decltype(values)>>) {
      rec.cvalues = &values;
    } else {
      rec.values = &values;
      rec.cvalues = &values;
    }
    r.push_back(std::move(rec));
  };
  for (std::size_t s = 0; s < w.encoder.size(); ++s) {
    auto& k = w.encoder[s];
    const std::string p = "encoder." + std::to_string(s);
    add(p + ".weight", dims_of(k), k.weights);
    add(p + ".bias", {static_cast<std::uint32_t>(k.out_channels)}, k.bias);
  }
  for (std::size_t b = 0; b < w.blocks.size(); ++b) {
    auto& blk = w.blocks[b];
    const std::string p = "block." + std::to_string(b);
    const auto ch = static_cast<std::uint32_t>(blk.conv.out_channels);
    add(p + ".conv.weight", dims_of(blk.conv), blk.conv.weights);
    add(p + ".conv.bias", {ch}, blk.conv.bias);
    add(p + ".bn.gamma", {ch}, blk.bn.gamma);
    add(p + ".bn.beta", {ch}, blk.bn.beta);
    add(p + ".bn.mean", {ch}, blk.bn.running_mean);
    add(p + ".bn.var", {ch}, blk.bn.running_var);
  }
  add("classifier.weight", dims_of(w.classifier), w.classifier.weights);
  add("classifier.bias", {static_cast<std::uint32_t>(w.classifier.out_channels)}, w.classifier.bias);
  return r;
}

// "block.1.conv.weight" -> "block 1"; other names returned unchanged.
std::string layer_of(const std::string& name) {
  const auto dot = name.find('.');
  if (dot == std::string::npos) return name;
  const auto dot2 = name.find('.', dot + 1);
  if (dot2 == std::string::npos) return name.substr(0, dot);
  const std::string_view idx(name.data() + dot + 1, dot2 - dot - 1);
  if (!idx.empty() && idx.find_first_not_of("0123456789") == std::string_view::npos) {
    return name.substr(0, dot) + " " + std::string(idx);
  }
  return name.substr(0, dot);
}

std::string dims_str(const std::vector<std::uint32_t>& d) {
  std::string s = "[";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + "]";
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(double v) { le(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  const std::vector<char>& data() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}

  void need(std::size_t n, const std::string& what) const {
    if (buf_.size() - pos_ < n) {
      throw TruncatedError("weight file truncated while reading " + what + " (need " +
                           std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                           ", file has " + std::to_string(buf_.size()) + ")");
    }
  }
  template <typename T>
  T le(const std::string& what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n, const std::string& what) {
    need(n, what);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_weights(const WeightStore& w, const std::filesystem::path& path) {
  const auto records = records_of(w);
  Writer out;
  out.bytes(kMagic.data(), kMagic.size());
  out.le<std::uint16_t>(kWeightFormatVersion);
  out.le<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    out.le<std::uint16_t>(static_cast<std::uint16_t>(r.name.size()));
    out.bytes(r.name.data(), r.name.size());
    out.le<std::uint8_t>(static_cast<std::uint8_t>(r.dims.size()));
    for (auto d : r.dims) out.le<std::uint32_t>(d);
  }
  for (const auto& r : records) {
    if (r.cvalues->size() != r.count()) {
      throw ContractError("weight record " + r.name + " holds " + std::to_string(r.cvalues->size()) +
                          " values, shape " + dims_str(r.dims) + " needs " +
                          std::to_string(r.count()));
    }
    for (double v : *r.cvalues) out.f32(v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(out.data().data(), static_cast<std::streamsize>(out.data().size()));
  if (!f) throw IoError("failed writing " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path, const DecoderConfig& c) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open weight file " + path.string());
  Reader in(std::vector<char>(std::istreambuf_iterator<char>(f), {}));

  const std::string magic = in.str(kMagic.size(), "magic");
  if (magic != std::string(kMagic.data(), kMagic.size())) {
    throw FormatError("not a SEGW weight file: bad magic in " + path.string());
  }
  const auto version = in.le<std::uint16_t>("version");
  if (version != kWeightFormatVersion) {
    throw FormatError("unsupported SEGW version " + std::to_string(version) + " (expected " +
                      std::to_string(kWeightFormatVersion) + ")");
  }

  WeightStore w = zero_weights(c);
  auto expected = records_of(w);
  const auto count = in.le<std::uint32_t>("record count");
  if (count != expected.size()) {
    throw ShapeMismatchError("weight file declares " + std::to_string(count) +
                             " records, config expects " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& want = expected[i];
    const std::string ctx = "record " + std::to_string(i) + " header";
    const auto name_len = in.le<std::uint16_t>(ctx);
    const std::string name = in.str(name_len, ctx);
    if (name != want.name) {
      throw ShapeMismatchError("record " + std::to_string(i) + " is '" + name + "', expected '" +
                               want.name + "' (" + layer_of(want.name) + ")");
    }
    const auto rank = in.le<std::uint8_t>("record '" + name + "' rank");
    std::vector<std::uint32_t> dims(rank);
    for (auto& d : dims) d = in.le<std::uint32_t>("record '" + name + "' dims");
    if (dims != want.dims) {
      throw ShapeMismatchError("shape mismatch in " + layer_of(name) + " (record '" + name +
                               "'): file declares " + dims_str(dims) + ", config expects " +
                               dims_str(want.dims));
    }
  }
  std::size_t total = 0;
  for (const auto& r : expected) total += r.count();
  if (in.remaining() < total * 4) {
    // Locate the first record whose payload is cut short.
    std::size_t acc = 0;
    for (const auto& r : expected) {
      acc += r.count() * 4;
      if (acc > in.remaining()) {
        throw TruncatedError("weight file truncated in payload of record '" + r.name + "' (" +
                             layer_of(r.name) + "): need " + std::to_string(total * 4) +
                             " payload bytes, have " + std::to_string(in.remaining()));
      }
    }
  }
  if (in.remaining() > total * 4) {
    throw FormatError("weight file has " + std::to_string(in.remaining() - total * 4) +
                      " trailing bytes after the last payload");
  }
  for (auto& r : expected) {
    for (double& v : *r.values) {
      v = static_cast<double>(std::bit_cast<float>(in.le<std::uint32_t>(r.name)));
    }
  }
  for (auto& b : w.blocks) b.bn.epsilon = c.bn_epsilon;
  return w;
}

}  // namespace lungseg
