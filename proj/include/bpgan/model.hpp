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

#include <cstdint>
#include <string>
#include <vector>

#include "bpgan/layers.hpp"

namespace bpgan {

/// A fixed-weight feed-forward network: an ordered layer chain with optional
/// residual skips. The same structure serves the generator, encoder,
/// discriminator, and feature network, differing only in shape conventions.
/// Immutable after construction/load; safe to share across threads.
struct Model {
  std::vector<LayerSpec> layers;
  Shape input_shape;
  Shape output_shape;           // derived by validate()
  std::uint64_t model_id = 0;   // digest of the serialized form; set by model_io

  std::size_t input_numel() const { return shape_numel(input_shape); }
  std::size_t output_numel() const { return shape_numel(output_shape); }
};

/// Checks the shape chain end to end and derives output_shape.
/// Errors carry the offending layer index.
inline void validate_model(Model& m) {
  if (m.layers.empty())
    fail(Errc::format, "model", "empty-model", "model has no layers");
  Shape prev = m.input_shape;
  std::vector<Shape> outputs;
  outputs.reserve(m.layers.size());
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const LayerSpec& layer = m.layers[i];
    const Shape declared = layer_in_shape(layer);
    const LayerKind kind = layer_kind(layer);
    const bool flat_ok = kind == LayerKind::dense && shape_numel(declared) == shape_numel(prev);
    if (declared != prev && !flat_ok)
      fail(Errc::format, "model", "shape-chain-break",
           "layer " + std::to_string(i) + " (" + layer_kind_name(kind) + ") expects " +
               shape_str(declared) + " but receives " + shape_str(prev));
    if (const auto* aff = std::get_if<AffineNormLayer>(&layer)) {
      if (aff->scale.size() != declared[0] || aff->shift.size() != declared[0])
        fail(Errc::format, "model", "bad-weights",
             "layer " + std::to_string(i) + ": affine-norm parameter size mismatch");
      for (double s : aff->scale)
        if (s == 0.0)
          fail(Errc::format, "model", "zero-scale",
               "layer " + std::to_string(i) + ": affine-norm scale entry is zero");
    }
    if (const auto* res = std::get_if<ResidualAddLayer>(&layer)) {
      if (res->skip_from < -1 || res->skip_from >= static_cast<int>(i))
        fail(Errc::format, "model", "bad-skip",
             "layer " + std::to_string(i) + ": residual skip index " +
                 std::to_string(res->skip_from) + " out of range");
      const Shape& src = res->skip_from < 0 ? m.input_shape : outputs[res->skip_from];
      if (shape_numel(src) != shape_numel(declared))
        fail(Errc::format, "model", "bad-skip",
             "layer " + std::to_string(i) + ": residual source shape " + shape_str(src) +
                 " incompatible with " + shape_str(declared));
    }
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      if (d->weight.size() != d->out_dim * d->in_dim() || d->bias.size() != d->out_dim)
        fail(Errc::format, "model", "bad-weights",
             "layer " + std::to_string(i) + ": dense weight size mismatch");
    }
    if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
      if (declared.size() != 3)
        fail(Errc::format, "model", "bad-shape",
             "layer " + std::to_string(i) + ": conv2d input must be rank 3");
      const std::size_t expect = c->p.out_channels * declared[0] * c->p.kh * c->p.kw;
      if (c->weight.size() != expect || c->bias.size() != c->p.out_channels)
        fail(Errc::format, "model", "bad-weights",
             "layer " + std::to_string(i) + ": conv2d weight size mismatch");
    }
    if (const auto* t = std::get_if<TConv2dLayer>(&layer)) {
      if (declared.size() != 3)
        fail(Errc::format, "model", "bad-shape",
             "layer " + std::to_string(i) + ": transposed-conv2d input must be rank 3");
      const std::size_t expect = declared[0] * t->p.out_channels * t->p.kh * t->p.kw;
      if (t->weight.size() != expect || t->bias.size() != t->p.out_channels)
        fail(Errc::format, "model", "bad-weights",
             "layer " + std::to_string(i) + ": transposed-conv2d weight size mismatch");
      if ((declared[1] - 1) * t->p.stride + t->p.kh <= 2 * t->p.pad ||
          (declared[2] - 1) * t->p.stride + t->p.kw <= 2 * t->p.pad)
        fail(Errc::format, "model", "bad-shape",
             "layer " + std::to_string(i) + ": transposed-conv2d output collapses to zero");
    }
    prev = layer_out_shape(layer);
    outputs.push_back(prev);
  }
  m.output_shape = prev;
}

}  // namespace bpgan
