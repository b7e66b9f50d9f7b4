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
#include <utility>
#include <vector>

#include "bpgan/autodiff.hpp"
#include "bpgan/msssim.hpp"

namespace bpgan {

// Compression-time objectives F(x, G(z)) and their pieces. The two combined
// forms are
//
//   image:  -D(G(z)) + lambda3 * ((1 - MS-SSIM) + gamma * MSE)
//   speech: L_feat(x, G(z)) + lambda4 * MSE
//
// with the discriminator term optional. Everything is differentiable with
// respect to z end to end; gradients flow through the fixed-weight networks
// via the autodiff tape.

struct ImageObjectiveConfig {
  double lambda3 = 1.0;
  double gamma = 0.1;  // MSE weight inside the distortion term
  MsssimConfig msssim;
  bool use_discriminator = false;
  const Model* discriminator = nullptr;
};

struct SpeechObjectiveConfig {
  double lambda4 = 10.0;
  const Model* feature_net = nullptr;
  std::vector<std::size_t> feature_layers;  // conv layer positions in feature_net
};

inline double mse(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "objectives");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double d = x.data[i] - y.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.numel());
}

/// d mse(x, y) / d y = 2 (y - x) / n, accumulated into grad with weight c.
inline void add_mse_grad(const Tensor& x, const Tensor& y, double c, Tensor& grad) {
  const double s = 2.0 * c / static_cast<double>(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i) grad.data[i] += s * (y.data[i] - x.data[i]);
}

inline double msssim(const Tensor& x, const Tensor& y, const ImageObjectiveConfig& cfg) {
  return msssim_index(x, y, cfg.msssim);
}

/// -D(y). Optionally accumulates c * d(-D(y))/dy into grad.
inline double discriminator_term(const Model& disc, const Tensor& y, double c = 1.0,
                                 Tensor* grad = nullptr) {
  if (disc.output_numel() != 1)
    fail(Errc::format, "objectives", "bad-discriminator", "discriminator output must be scalar");
  auto [out, tape] = forward(disc, y);
  if (grad != nullptr) {
    Tensor og = Tensor::zeros(out.shape);
    og.data[0] = -c;
    Tensor dy = backward_output_grad(tape, og);
    for (std::size_t i = 0; i < grad->numel(); ++i) grad->data[i] += dy.data[i];
  }
  return -out.data[0];
}

namespace detail {

inline void check_feature_config(const SpeechObjectiveConfig& cfg) {
  if (cfg.feature_net == nullptr)
    fail(Errc::io, "objectives", "bad-config", "speech objective needs a feature network");
  for (std::size_t idx : cfg.feature_layers) {
    if (idx >= cfg.feature_net->layers.size())
      fail(Errc::io, "objectives", "bad-feature-layer",
           "feature layer index " + std::to_string(idx) + " out of range");
    const LayerKind k = layer_kind(cfg.feature_net->layers[idx]);
    if (k != LayerKind::conv2d && k != LayerKind::tconv2d)
      fail(Errc::io, "objectives", "bad-feature-layer",
           "feature layer " + std::to_string(idx) + " is " +
               layer_kind_name(k) + ", expected a convolution layer");
  }
}

}  // namespace detail

/// Sum over configured conv layers of the mean squared distance between the
/// activation maps of x and y. Optionally accumulates c * dL/dy into grad.
inline double feature_loss(const Tensor& x, const Tensor& y, const SpeechObjectiveConfig& cfg,
                           double c = 1.0, Tensor* grad = nullptr) {
  detail::check_feature_config(cfg);
  const Model& net = *cfg.feature_net;
  auto [ox, tape_x] = forward(net, x);
  auto [oy, tape_y] = forward(net, y);
  double loss = 0.0;
  std::vector<std::pair<std::size_t, Tensor>> seeds;
  for (std::size_t idx : cfg.feature_layers) {
    const Tensor& ax = tape_x.acts[idx + 1];
    const Tensor& ay = tape_y.acts[idx + 1];
    loss += mse(ax, ay);
    if (grad != nullptr) {
      Tensor seed = Tensor::zeros(ay.shape);
      add_mse_grad(ax, ay, c, seed);
      seeds.emplace_back(idx, std::move(seed));
    }
  }
  if (grad != nullptr) {
    Tensor dy = backward_output_grad(tape_y, Tensor::zeros(oy.shape), seeds);
    for (std::size_t i = 0; i < grad->numel(); ++i) grad->data[i] += dy.data[i];
  }
  return loss;
}

/// Value and d/dy of the image criterion at reconstruction y.
inline double image_criterion(const Tensor& x, const Tensor& y, const ImageObjectiveConfig& cfg,
                              Tensor* grad = nullptr) {
  if (cfg.use_discriminator && cfg.discriminator == nullptr)
    fail(Errc::io, "objectives", "bad-config", "use_discriminator set but no discriminator given");
  double value = 0.0;
  if (grad != nullptr) *grad = Tensor::zeros(y.shape);
  if (cfg.use_discriminator) value += discriminator_term(*cfg.discriminator, y, 1.0, grad);
  Tensor ms_grad;
  const double index = msssim_index(x, y, cfg.msssim, grad ? &ms_grad : nullptr);
  value += cfg.lambda3 * (1.0 - index);
  if (grad != nullptr) axpy(-cfg.lambda3, ms_grad, *grad);
  value += cfg.lambda3 * cfg.gamma * mse(x, y);
  if (grad != nullptr) add_mse_grad(x, y, cfg.lambda3 * cfg.gamma, *grad);
  return value;
}

/// Value and d/dy of the speech criterion at reconstruction y.
inline double speech_criterion(const Tensor& x, const Tensor& y, const SpeechObjectiveConfig& cfg,
                               Tensor* grad = nullptr) {
  if (grad != nullptr) *grad = Tensor::zeros(y.shape);
  double value = feature_loss(x, y, cfg, 1.0, grad);
  value += cfg.lambda4 * mse(x, y);
  if (grad != nullptr) add_mse_grad(x, y, cfg.lambda4, *grad);
  return value;
}

/// Callable objective bundle handed to the latent search: F(z) and its
/// gradient with respect to z, with the generator baked in.
struct Objective {
  std::function<double(const Tensor& z)> value;
  std::function<double(const Tensor& z, Tensor& grad_z)> value_and_grad;
};

namespace detail {

template <typename CriterionFn>
Objective objective_through(const Model& g, CriterionFn crit) {
  Objective o;
  o.value = [&g, crit](const Tensor& z) {
    auto [y, tape] = forward(g, z);
    return crit(y, nullptr);
  };
  o.value_and_grad = [&g, crit](const Tensor& z, Tensor& grad_z) {
    auto [y, tape] = forward(g, z);
    Tensor dy;
    const double value = crit(y, &dy);
    grad_z = backward_output_grad(tape, dy);
    return value;
  };
  return o;
}

}  // namespace detail

inline Objective make_image_objective(const Tensor& x, const Model& g, ImageObjectiveConfig cfg) {
  return detail::objective_through(
      g, [x, cfg](const Tensor& y, Tensor* dy) { return image_criterion(x, y, cfg, dy); });
}

inline Objective make_speech_objective(const Tensor& x, const Model& g,
                                       SpeechObjectiveConfig cfg) {
  return detail::objective_through(
      g, [x, cfg](const Tensor& y, Tensor* dy) { return speech_criterion(x, y, cfg, dy); });
}

/// Plain F = ||G(z) - x||^2 / n. The quadratic workhorse of the synthetic
/// suites and the exhaustive-oracle tests.
inline Objective make_mse_objective(const Tensor& x, const Model& g) {
  return detail::objective_through(g, [x](const Tensor& y, Tensor* dy) {
    if (dy != nullptr) {
      *dy = Tensor::zeros(y.shape);
      add_mse_grad(x, y, 1.0, *dy);
    }
    return mse(x, y);
  });
}

}  // namespace bpgan
