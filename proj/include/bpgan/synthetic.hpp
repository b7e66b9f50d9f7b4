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
#include <cstdint>
#include <vector>

#include "bpgan/model.hpp"
#include "bpgan/model_io.hpp"
#include "bpgan/rng.hpp"

namespace bpgan {

// Deterministic stand-in generators with known analytic structure. They take
// the place of trained networks in tests and benchmarks:
//
//   orthonormal-linear  G(z) = A z with A^T A = I, so the unconstrained
//                       optimum of ||G(z) - x||^2 is z* = A^T x (closed form).
//   dct-decoder         A's columns are the first latent_dim type-II DCT
//                       basis vectors (exactly orthonormal, seed-free).
//   random-mlp          dense/tanh stack with seeded Gaussian weights.
//
// All constructors round their weights to f32 so that an in-memory model and
// its serialized form agree bit-for-bit.

enum class SyntheticKind : std::uint8_t {
  orthonormal_linear = 1,
  dct_decoder = 2,
  random_mlp = 3,
};

struct SyntheticModelSpec {
  SyntheticKind kind = SyntheticKind::orthonormal_linear;
  std::size_t latent_dim = 0;
  Shape signal_shape;
  // random-mlp only:
  std::size_t depth = 2;
  std::size_t width = 32;
  std::uint64_t seed = 0;
};

namespace detail {

inline void round_weights_f32(std::vector<double>& w) {
  for (double& v : w) v = static_cast<double>(static_cast<float>(v));
}

inline void round_model_f32(Model& m) {
  for (LayerSpec& layer : m.layers) {
    if (auto* d = std::get_if<DenseLayer>(&layer)) {
      round_weights_f32(d->weight);
      round_weights_f32(d->bias);
    } else if (auto* c = std::get_if<Conv2dLayer>(&layer)) {
      round_weights_f32(c->weight);
      round_weights_f32(c->bias);
    } else if (auto* t = std::get_if<TConv2dLayer>(&layer)) {
      round_weights_f32(t->weight);
      round_weights_f32(t->bias);
    } else if (auto* a = std::get_if<AffineNormLayer>(&layer)) {
      round_weights_f32(a->scale);
      round_weights_f32(a->shift);
    } else if (auto* lr = std::get_if<LeakyReluLayer>(&layer)) {
      lr->slope = static_cast<double>(static_cast<float>(lr->slope));
    }
  }
}

/// Column-orthonormal n x d matrix (n >= d), column-major in the returned
/// vector of columns. Gaussian draws followed by modified Gram-Schmidt with
/// one re-orthogonalization pass.
inline std::vector<std::vector<double>> orthonormal_columns(std::size_t n, std::size_t d,
                                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  for (auto& c : cols)
    for (double& v : c) v = rng.normal();
  for (std::size_t k = 0; k < d; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += cols[j][i] * cols[k][i];
        for (std::size_t i = 0; i < n; ++i) cols[k][i] -= proj * cols[j][i];
      }
    }
    double norm = 0.0;
    for (double v : cols[k]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12)
      fail(Errc::numeric, "synthetic", "degenerate-basis",
           "Gram-Schmidt collapsed; signal dimension too small for latent dimension");
    for (double& v : cols[k]) v /= norm;
  }
  return cols;
}

/// Column k of the orthonormal type-II DCT basis on n points:
///   a_ik = c_k cos(pi (2i+1) k / (2n)),  c_0 = sqrt(1/n), c_k = sqrt(2/n).
inline std::vector<std::vector<double>> dct2_columns(std::size_t n, std::size_t d) {
  const double pi = 3.14159265358979323846;
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  for (std::size_t k = 0; k < d; ++k) {
    const double ck = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                             : std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      cols[k][i] = ck * std::cos(pi * (2.0 * static_cast<double>(i) + 1.0) *
                                 static_cast<double>(k) / (2.0 * static_cast<double>(n)));
  }
  return cols;
}

/// The A matrix (signal_numel x latent_dim) behind a linear synthetic spec.
inline std::vector<std::vector<double>> synthetic_columns(const SyntheticModelSpec& spec) {
  const std::size_t n = shape_numel(spec.signal_shape);
  if (spec.kind == SyntheticKind::orthonormal_linear)
    return orthonormal_columns(n, spec.latent_dim, spec.seed);
  return dct2_columns(n, spec.latent_dim);
}

inline DenseLayer dense_from_columns(const std::vector<std::vector<double>>& cols,
                                     const Shape& in_shape) {
  const std::size_t d = cols.size();
  const std::size_t n = cols[0].size();
  DenseLayer l;
  l.in_shape = in_shape;
  l.out_dim = n;
  l.weight.resize(n * d);
  l.bias.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) l.weight[i * d + k] = cols[k][i];
  return l;
}

}  // namespace detail

inline void check_synthetic_spec(const SyntheticModelSpec& spec) {
  const std::size_t n = shape_numel(spec.signal_shape);
  if (spec.latent_dim == 0 || n == 0)
    fail(Errc::io, "synthetic", "bad-dims", "latent and signal dimensions must be positive");
  if (spec.kind != SyntheticKind::random_mlp && spec.latent_dim > n)
    fail(Errc::io, "synthetic", "bad-dims",
         "linear synthetic generators need latent_dim <= signal size (" +
             std::to_string(spec.latent_dim) + " > " + std::to_string(n) + ")");
  if (spec.kind == SyntheticKind::random_mlp && (spec.depth == 0 || spec.width == 0))
    fail(Errc::io, "synthetic", "bad-dims", "random-mlp needs positive depth and width");
}

/// Builds the generator described by `spec`. Pure function of the spec.
inline Model make_synthetic(const SyntheticModelSpec& spec) {
  check_synthetic_spec(spec);
  const std::size_t n = shape_numel(spec.signal_shape);
  Model m;
  m.input_shape = {spec.latent_dim};
  if (spec.kind == SyntheticKind::random_mlp) {
    Rng rng(spec.seed);
    std::size_t prev = spec.latent_dim;
    for (std::size_t i = 0; i < spec.depth; ++i) {
      const bool last = i + 1 == spec.depth;
      DenseLayer l;
      l.in_shape = {prev};
      l.out_dim = last ? n : spec.width;
      l.weight.resize(l.out_dim * prev);
      l.bias.resize(l.out_dim);
      const double scale = 1.0 / std::sqrt(static_cast<double>(prev));
      for (double& v : l.weight) v = scale * rng.normal();
      for (double& v : l.bias) v = 0.1 * rng.normal();
      prev = l.out_dim;
      m.layers.emplace_back(std::move(l));
      if (!last) m.layers.emplace_back(TanhLayer{{prev}});
    }
  } else {
    m.layers.emplace_back(detail::dense_from_columns(detail::synthetic_columns(spec),
                                                     {spec.latent_dim}));
  }
  if (spec.signal_shape.size() > 1) m.layers.emplace_back(ReshapeLayer{{n}, spec.signal_shape});
  detail::round_model_f32(m);
  validate_model(m);
  assign_model_id(m);
  return m;
}

/// Exact left inverse of a linear synthetic generator: E(x) = A^T x, the
/// closed-form unconstrained optimum of ||A z - x||^2. Serves as the oracle
/// encoder in initialization studies.
inline Model make_oracle_encoder(const SyntheticModelSpec& spec) {
  check_synthetic_spec(spec);
  if (spec.kind == SyntheticKind::random_mlp)
    fail(Errc::io, "synthetic", "bad-dims", "oracle encoder exists only for linear generators");
  const auto cols = detail::synthetic_columns(spec);
  const std::size_t n = cols[0].size();
  const std::size_t d = cols.size();
  DenseLayer l;
  l.in_shape = spec.signal_shape;
  l.out_dim = d;
  l.weight.resize(d * n);
  l.bias.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i) l.weight[k * n + i] = cols[k][i];
  Model m;
  m.input_shape = spec.signal_shape;
  m.layers.emplace_back(std::move(l));
  detail::round_model_f32(m);
  validate_model(m);
  assign_model_id(m);
  return m;
}

}  // namespace bpgan
