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

#include <functional>
#include <stdexcept>
#include <utility>

#include <catch2/catch_amalgamated.hpp>

#include "bpgan/bpgan.hpp"

namespace bpgan_test {

/// Runs fn, which must throw bpgan::Error; returns the error for inspection.
template <typename Fn>
bpgan::Error expect_error(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const bpgan::Error& e) {
    return e;
  }
  throw std::runtime_error("expected a bpgan::Error, none was thrown");
}

/// Central finite difference of a scalar function along one coordinate.
inline double fd_coordinate(const std::function<double(const bpgan::Tensor&)>& f,
                            const bpgan::Tensor& z, std::size_t i, double eps = 1e-5) {
  bpgan::Tensor zp = z, zm = z;
  zp.data[i] += eps;
  zm.data[i] -= eps;
  return (f(zp) - f(zm)) / (2.0 * eps);
}

/// Largest relative mismatch between an analytic gradient and central finite
/// differences over every coordinate.
inline double max_fd_error(const std::function<double(const bpgan::Tensor&)>& f,
                           const bpgan::Tensor& z, const bpgan::Tensor& grad,
                           double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < z.numel(); ++i) {
    const double fd = fd_coordinate(f, z, i, eps);
    const double denom = std::max({std::abs(fd), std::abs(grad.data[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - grad.data[i]) / denom);
  }
  return worst;
}

/// Seeded tensor with standard-normal entries.
inline bpgan::Tensor random_tensor(const bpgan::Shape& shape, std::uint64_t seed) {
  bpgan::Rng rng(seed);
  bpgan::Tensor t(shape);
  for (double& v : t.data) v = rng.normal();
  return t;
}

}  // namespace bpgan_test
