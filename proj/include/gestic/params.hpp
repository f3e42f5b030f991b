// Copyright 2026 The gestic Authors
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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestic/tensor.hpp"

namespace gestic {

enum class Init { Zero, One, XavierUniform };

// Named parameter set. Initialization draws from one seeded generator in
// registration order, so a fixed seed plus a fixed build order gives a fixed
// model. Frozen entries are skipped by the optimizer and treated as constants
// on the tape.
class ParamStore {
 public:
  struct Entry {
    Tensor t;
    bool frozen = false;
  };

  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

  Tensor& add(const std::string& name, std::vector<int> shape, Init init) {
    if (entries_.count(name)) throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
    Entry e;
    e.t = Tensor(std::move(shape));
    switch (init) {
      case Init::Zero:
        break;
      case Init::One:
        for (auto& x : e.t.v) x = real_t(1);
        break;
      case Init::XavierUniform: {
        const auto [fan_in, fan_out] = fans(e.t.shape);
        const real_t lim = std::sqrt(real_t(6) / real_t(fan_in + fan_out));
        std::uniform_real_distribution<real_t> dist(-lim, lim);
        for (auto& x : e.t.v) x = dist(rng_);
        break;
      }
    }
    auto& slot = entries_[name];
    slot = std::move(e);
    return slot.t;
  }

  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  Tensor& at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
    return it->second.t;
  }
  const Tensor& at(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
    return it->second.t;
  }

  bool frozen(const std::string& name) const { return entries_.at(name).frozen; }

  void freeze_prefix(const std::string& prefix) {
    for (auto& [name, e] : entries_)
      if (name.rfind(prefix, 0) == 0) e.frozen = true;
  }

  // Copies every entry of `other` into this store (used to attach a
  // pre-trained classifier to a fresh model). Frozen flags carry over.
  void absorb(const ParamStore& other) {
    for (const auto& [name, e] : other.entries_) {
      if (entries_.count(name)) throw std::invalid_argument("ParamStore: absorb would overwrite '" + name + "'");
      entries_[name] = e;
    }
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }
  std::uint64_t seed() const { return seed_; }

 private:
  static std::pair<long, long> fans(const std::vector<int>& shape) {
    if (shape.size() == 3)  // conv kernel (taps, in, out)
      return {static_cast<long>(shape[0]) * shape[1], static_cast<long>(shape[0]) * shape[2]};
    if (shape.size() == 2) return {shape[0], shape[1]};
    return {shape[0], shape[0]};
  }

  std::map<std::string, Entry> entries_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
};

// Checkpoint format: little-endian binary, "GSTCKPT1" magic, store seed,
// entry count, then per entry name / frozen flag / dims / raw float64 values.
// Values round-trip bit-exactly.
namespace ckpt {

inline constexpr char kMagic[8] = {'G', 'S', 'T', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
  T x;
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
  return x;
}

}  // namespace ckpt

inline void save_checkpoint(const ParamStore& ps, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  os.write(ckpt::kMagic, sizeof(ckpt::kMagic));
  ckpt::write_pod(os, static_cast<std::uint64_t>(ps.seed()));
  ckpt::write_pod(os, static_cast<std::uint32_t>(ps.entries().size()));
  for (const auto& [name, e] : ps.entries()) {
    ckpt::write_pod(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    ckpt::write_pod(os, static_cast<std::uint8_t>(e.frozen ? 1 : 0));
    ckpt::write_pod(os, static_cast<std::uint32_t>(e.t.shape.size()));
    for (int d : e.t.shape) ckpt::write_pod(os, static_cast<std::int32_t>(d));
    for (real_t x : e.t.v) ckpt::write_pod(os, static_cast<double>(x));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

inline ParamStore load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[sizeof(ckpt::kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, ckpt::kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "' (not a gestic checkpoint?)");
  const auto seed = ckpt::read_pod<std::uint64_t>(is, path);
  ParamStore ps(seed);
  const auto count = ckpt::read_pod<std::uint32_t>(is, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = ckpt::read_pod<std::uint32_t>(is, path);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
    const bool frozen = ckpt::read_pod<std::uint8_t>(is, path) != 0;
    const auto ndim = ckpt::read_pod<std::uint32_t>(is, path);
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = ckpt::read_pod<std::int32_t>(is, path);
    Tensor t(shape);
    for (auto& x : t.v) x = static_cast<real_t>(ckpt::read_pod<double>(is, path));
    ps.entries()[name] = ParamStore::Entry{std::move(t), frozen};
  }
  return ps;
}

}  // namespace gestic
