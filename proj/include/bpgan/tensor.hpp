// Copyright 2026 The BPGAN Codec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "bpgan/error.hpp"

namespace bpgan {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return s.empty() ? 0 : n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  out += "]";
  return out;
}

/// Dense row-major array of doubles with shape metadata. Used for signals,
/// activations, gradients, and (rank-1) latent vectors.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)), data(shape_numel(shape), 0.0) {}
  Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_numel(shape))
      fail(Errc::internal, "tensor", "size-mismatch",
           "data size " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
  }

  static Tensor flat(std::vector<double> values) {
    Shape s{values.size()};
    return Tensor(std::move(s), std::move(values));
  }
  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }

  std::size_t numel() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  Tensor reshaped(Shape s) const {
    if (shape_numel(s) != numel())
      fail(Errc::format, "tensor", "reshape-mismatch",
           "cannot reshape " + shape_str(shape) + " to " + shape_str(s));
    Tensor out = *this;
    out.shape = std::move(s);
    return out;
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, std::string_view module) {
  if (!a.same_shape(b))
    fail(Errc::format, module, "shape-mismatch",
         "shape " + shape_str(a.shape) + " vs " + shape_str(b.shape));
}

inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

inline double squared_norm(const Tensor& a) { return dot(a, a); }

inline Tensor operator+(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

inline Tensor operator-(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

inline Tensor operator*(double c, const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data) v *= c;
  return out;
}

inline void axpy(double c, const Tensor& x, Tensor& y) {
  for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] += c * x.data[i];
}

}  // namespace bpgan
