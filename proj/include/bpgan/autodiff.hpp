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

#include <optional>
#include <utility>
#include <vector>

#include "bpgan/model.hpp"

namespace bpgan {

// Reverse-mode differentiation over fixed-weight layer chains. Only the
// gradient with respect to the model INPUT is ever produced; weights are
// frozen by construction. All accumulation is in double.

/// Record of one forward pass. acts[0] is the input, acts[i+1] the output of
/// layer i. Single-use: a backward pass consumes the tape.
struct Tape {
  const Model* model = nullptr;
  std::vector<Tensor> acts;
  bool consumed = false;

  // Optional scalar terminal attached by an objective: the objective value
  // and its gradient with respect to the final model output.
  std::optional<double> terminal_value;
  Tensor terminal_grad;

  const Tensor& output() const { return acts.back(); }
};

/// Runs the model on `input`, caching every activation for one backward pass.
/// Deterministic: identical input and weights give bit-identical output.
inline std::pair<Tensor, Tape> forward(const Model& model, const Tensor& input) {
  if (input.shape != model.input_shape && input.numel() != model.input_numel())
    fail(Errc::format, "autodiff", "shape-mismatch",
         "model input expects " + shape_str(model.input_shape) + " but got " +
             shape_str(input.shape) + " (layer 0)");
  Tape tape;
  tape.model = &model;
  tape.acts.reserve(model.layers.size() + 1);
  tape.acts.push_back(input.shape == model.input_shape ? input : input.reshaped(model.input_shape));
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    const Tensor* skip = nullptr;
    if (const auto* res = std::get_if<ResidualAddLayer>(&layer))
      skip = &tape.acts[static_cast<std::size_t>(res->skip_from + 1)];
    tape.acts.push_back(layer_forward(layer, tape.acts.back(), skip));
  }
  Tensor out = tape.acts.back();
  return {std::move(out), std::move(tape)};
}

/// Pulls a gradient at the model output back to the model input, with
/// optional extra gradients injected at intermediate activations
/// (seeds[i] adds to the gradient of layer i's output). Consumes the tape.
inline Tensor backward_output_grad(Tape& tape, const Tensor& out_grad,
                                   const std::vector<std::pair<std::size_t, Tensor>>& seeds = {}) {
  if (tape.consumed)
    fail(Errc::internal, "autodiff", "tape-consumed", "tape already used by a backward pass");
  tape.consumed = true;
  const Model& model = *tape.model;
  const std::size_t n = model.layers.size();
  require_same_shape(out_grad, tape.acts[n], "autodiff");

  // grads[i] accumulates the objective gradient w.r.t. acts[i].
  std::vector<Tensor> grads(n + 1);
  grads[n] = out_grad;
  for (const auto& [idx, g] : seeds) {
    if (idx >= n)
      fail(Errc::internal, "autodiff", "bad-seed", "seed index out of range");
    if (grads[idx + 1].data.empty())
      grads[idx + 1] = g;
    else
      for (std::size_t k = 0; k < g.data.size(); ++k) grads[idx + 1].data[k] += g.data[k];
  }

  for (std::size_t i = n; i-- > 0;) {
    if (grads[i + 1].data.empty()) grads[i + 1] = Tensor::zeros(tape.acts[i + 1].shape);
    const LayerSpec& layer = model.layers[i];
    Tensor dx = layer_backward(layer, grads[i + 1], tape.acts[i], tape.acts[i + 1]);
    if (grads[i].data.empty())
      grads[i] = std::move(dx);
    else
      for (std::size_t k = 0; k < dx.data.size(); ++k) grads[i].data[k] += dx.data[k];
    if (const auto* res = std::get_if<ResidualAddLayer>(&layer)) {
      // The skip branch passes the output gradient through unchanged.
      const std::size_t src = static_cast<std::size_t>(res->skip_from + 1);
      if (grads[src].data.empty()) grads[src] = Tensor::zeros(tape.acts[src].shape);
      for (std::size_t k = 0; k < grads[i + 1].data.size(); ++k)
        grads[src].data[k] += grads[i + 1].data[k];
    }
  }
  return std::move(grads[0]);
}

/// Gradient of the scalar terminal attached to the tape with respect to the
/// model input. The tape must carry a terminal (set by an objective).
inline Tensor backward_input(Tape& tape) {
  if (!tape.terminal_value.has_value())
    fail(Errc::internal, "autodiff", "no-terminal",
         "tape has no scalar terminal; attach an objective before backward_input");
  return backward_output_grad(tape, tape.terminal_grad);
}

}  // namespace bpgan
