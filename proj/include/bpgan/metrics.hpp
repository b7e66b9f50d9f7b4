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
#include <limits>

#include "bpgan/tensor.hpp"

namespace bpgan {

/// 10 log10(peak^2 / MSE); identical inputs report +infinity.
inline double psnr(const Tensor& x, const Tensor& y, double peak) {
  require_same_shape(x, y, "metrics");
  if (!(peak > 0.0)) fail(Errc::io, "metrics", "bad-config", "peak must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double d = x.data[i] - y.data[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(x.numel());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace bpgan
