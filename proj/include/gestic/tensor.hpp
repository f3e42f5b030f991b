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

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gestic {

// Scalar type for all numerics. Gradient checking assumes 64-bit; define
// GESTIC_REAL_FLOAT only for runs that never touch the finite-difference
// machinery.
#ifdef GESTIC_REAL_FLOAT
using real_t = float;
#else
using real_t = double;
#endif

inline std::string shape_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ')';
  return os.str();
}

// Dense row-major n-d array. Almost everything in the pipeline is rank-2
// (frames x channels); conv kernels are rank-3 (tap, in, out).
struct Tensor {
  std::vector<int> shape;
  std::vector<real_t> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, real_t fill = real_t(0)) : shape(std::move(s)) {
    v.assign(static_cast<std::size_t>(numel_of(shape)), fill);
  }

  static long numel_of(const std::vector<int>& s) {
    if (s.empty()) throw std::invalid_argument("Tensor: empty shape");
    long n = 1;
    for (int d : s) {
      if (d < 1) throw std::invalid_argument("Tensor: shape dims must be >= 1, got " + shape_str(s));
      n *= d;
    }
    return n;
  }

  static Tensor scalar(real_t x) {
    Tensor t({1});
    t.v[0] = x;
    return t;
  }

  static Tensor from_rows(int rows, int cols, std::vector<real_t> data) {
    Tensor t;
    t.shape = {rows, cols};
    if (static_cast<long>(data.size()) != static_cast<long>(rows) * cols)
      throw std::invalid_argument("Tensor::from_rows: data size does not match " + shape_str(t.shape));
    t.v = std::move(data);
    return t;
  }

  long numel() const { return static_cast<long>(v.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int rows() const { return shape.at(0); }
  int cols() const { return ndim() >= 2 ? shape.at(1) : 1; }

  real_t& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols() + c]; }
  real_t at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols() + c]; }

  // rank-3 access for conv kernels shaped (taps, in_ch, out_ch)
  real_t& at3(int k, int i, int o) {
    return v[(static_cast<std::size_t>(k) * shape[1] + i) * shape[2] + o];
  }
  real_t at3(int k, int i, int o) const {
    return v[(static_cast<std::size_t>(k) * shape[1] + i) * shape[2] + o];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  std::string shape_string() const { return shape_str(shape); }
};

}  // namespace gestic
