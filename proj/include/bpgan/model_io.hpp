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

#include <string>
#include <vector>

#include "bpgan/bytes.hpp"
#include "bpgan/model.hpp"

namespace bpgan {

// .bpgm weight container, little-endian throughout:
//
//   magic "BPGM" (4B) | version u8 = 1 | layer count u16
//   per layer:
//     kind tag u8
//     hyperparameter block (kind-specific; every block starts with the
//       layer's input shape as rank u8 + u32 dims):
//         dense:             out_dim u32
//         conv2d/tconv2d:    out_channels u32, kh u32, kw u32,
//                            stride u32, pad u32
//         leaky-relu:        slope f32
//         residual-add:      skip_from i32 (-1 = model input)
//         reshape:           target rank u8 + u32 dims
//         relu/tanh/sigmoid/frozen-affine-norm: (shape only)
//     weight blob length u64 (bytes) | raw f32 weights (weights ++ bias;
//       frozen-affine-norm stores scale ++ shift)
//   trailer: u64 FNV-1a digest of everything before it
//
// The trailer digest doubles as the model_id shared between transmitter and
// receiver. Weights round-trip bit-exactly: they live as f32 in the file and
// are widened to double in memory.

namespace detail {

inline void write_shape(ByteWriter& w, const Shape& s) {
  w.u8(static_cast<std::uint8_t>(s.size()));
  for (std::size_t d : s) w.u32(static_cast<std::uint32_t>(d));
}

inline Shape read_shape(ByteReader& r) {
  const std::size_t rank = r.u8();
  if (rank == 0 || rank > 4)
    fail(Errc::format, "model-io", "bad-shape", "layer shape rank " + std::to_string(rank));
  Shape s(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    s[i] = r.u32();
    if (s[i] == 0 || s[i] > (1u << 24))
      fail(Errc::format, "model-io", "bad-shape", "layer dimension " + std::to_string(s[i]));
  }
  return s;
}

inline void write_weight_blob(ByteWriter& w, const std::vector<double>& a,
                              const std::vector<double>& b) {
  w.u64(static_cast<std::uint64_t>(4 * (a.size() + b.size())));
  for (double v : a) w.f32(static_cast<float>(v));
  for (double v : b) w.f32(static_cast<float>(v));
}

inline std::vector<double> read_f32_blob(ByteReader& r, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<double>(r.f32());
  return out;
}

}  // namespace detail

inline Bytes save_model(const Model& model) {
  ByteWriter w;
  w.tag("BPGM");
  w.u8(1);
  w.u16(static_cast<std::uint16_t>(model.layers.size()));
  for (const LayerSpec& layer : model.layers) {
    w.u8(static_cast<std::uint8_t>(layer_kind(layer)));
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          detail::write_shape(w, l.in_shape);
          if constexpr (std::is_same_v<T, DenseLayer>) {
            w.u32(static_cast<std::uint32_t>(l.out_dim));
            detail::write_weight_blob(w, l.weight, l.bias);
          } else if constexpr (std::is_same_v<T, Conv2dLayer> || std::is_same_v<T, TConv2dLayer>) {
            w.u32(static_cast<std::uint32_t>(l.p.out_channels));
            w.u32(static_cast<std::uint32_t>(l.p.kh));
            w.u32(static_cast<std::uint32_t>(l.p.kw));
            w.u32(static_cast<std::uint32_t>(l.p.stride));
            w.u32(static_cast<std::uint32_t>(l.p.pad));
            detail::write_weight_blob(w, l.weight, l.bias);
          } else if constexpr (std::is_same_v<T, LeakyReluLayer>) {
            w.f32(static_cast<float>(l.slope));
            w.u64(0);
          } else if constexpr (std::is_same_v<T, AffineNormLayer>) {
            detail::write_weight_blob(w, l.scale, l.shift);
          } else if constexpr (std::is_same_v<T, ResidualAddLayer>) {
            w.i32(l.skip_from);
            w.u64(0);
          } else if constexpr (std::is_same_v<T, ReshapeLayer>) {
            detail::write_shape(w, l.target);
            w.u64(0);
          } else {
            w.u64(0);  // relu / tanh / sigmoid: no hyperparameters, no weights
          }
        },
        layer);
  }
  w.u64(fnv1a64(w.bytes()));
  return w.take();
}

inline Model load_model(const Bytes& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "BPGM", 4) != 0)
    fail(Errc::format, "model-io", "bad-magic", "not a BPGM weight file");
  if (bytes.size() < 4 + 1 + 2 + 8)
    fail(Errc::format, "model-io", "digest-mismatch", "file too short to hold a digest");
  // Digest is verified before structural parsing so that any truncation or
  // corruption surfaces as a digest mismatch rather than a parse error.
  std::uint64_t trailer = 0;
  for (int i = 0; i < 8; ++i)
    trailer |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
  const std::uint64_t computed = fnv1a64(bytes.data(), bytes.size() - 8);
  if (computed != trailer)
    fail(Errc::format, "model-io", "digest-mismatch",
         "weight digest mismatch (stored " + std::to_string(trailer) + ", computed " +
             std::to_string(computed) + ")");

  ByteReader r(bytes.data(), bytes.size() - 8, "model-io");
  r.u32();  // magic, already checked
  const std::uint8_t version = r.u8();
  if (version != 1)
    fail(Errc::format, "model-io", "unsupported-version",
         "BPGM version " + std::to_string(version) + " not supported");
  const std::size_t layer_count = r.u16();
  if (layer_count == 0)
    fail(Errc::format, "model-io", "empty-model", "weight file declares zero layers");

  Model m;
  m.layers.reserve(layer_count);
  for (std::size_t i = 0; i < layer_count; ++i) {
    r.set_block("layer " + std::to_string(i));
    const auto kind = static_cast<LayerKind>(r.u8());
    const Shape in_shape = detail::read_shape(r);
    switch (kind) {
      case LayerKind::dense: {
        DenseLayer l;
        l.in_shape = in_shape;
        l.out_dim = r.u32();
        const std::uint64_t blob = r.u64();
        const std::size_t expect = l.out_dim * (l.in_dim() + 1);
        if (blob != 4 * expect)
          fail(Errc::format, "model-io", "bad-weights", "dense weight blob size mismatch");
        l.weight = detail::read_f32_blob(r, l.out_dim * l.in_dim());
        l.bias = detail::read_f32_blob(r, l.out_dim);
        m.layers.emplace_back(std::move(l));
        break;
      }
      case LayerKind::conv2d:
      case LayerKind::tconv2d: {
        ConvParams p;
        p.out_channels = r.u32();
        p.kh = r.u32();
        p.kw = r.u32();
        p.stride = r.u32();
        p.pad = r.u32();
        if (in_shape.size() != 3 || p.stride == 0 || p.kh == 0 || p.kw == 0)
          fail(Errc::format, "model-io", "bad-shape", "invalid convolution geometry");
        const std::uint64_t blob = r.u64();
        const std::size_t wcount = p.out_channels * in_shape[0] * p.kh * p.kw;
        if (blob != 4 * (wcount + p.out_channels))
          fail(Errc::format, "model-io", "bad-weights", "conv weight blob size mismatch");
        if (kind == LayerKind::conv2d) {
          Conv2dLayer l;
          l.in_shape = in_shape;
          l.p = p;
          l.weight = detail::read_f32_blob(r, wcount);
          l.bias = detail::read_f32_blob(r, p.out_channels);
          m.layers.emplace_back(std::move(l));
        } else {
          TConv2dLayer l;
          l.in_shape = in_shape;
          l.p = p;
          l.weight = detail::read_f32_blob(r, wcount);
          l.bias = detail::read_f32_blob(r, p.out_channels);
          m.layers.emplace_back(std::move(l));
        }
        break;
      }
      case LayerKind::relu: {
        r.u64();
        m.layers.emplace_back(ReluLayer{in_shape});
        break;
      }
      case LayerKind::leaky_relu: {
        LeakyReluLayer l;
        l.in_shape = in_shape;
        l.slope = static_cast<double>(r.f32());
        r.u64();
        m.layers.emplace_back(std::move(l));
        break;
      }
      case LayerKind::tanh_act: {
        r.u64();
        m.layers.emplace_back(TanhLayer{in_shape});
        break;
      }
      case LayerKind::sigmoid: {
        r.u64();
        m.layers.emplace_back(SigmoidLayer{in_shape});
        break;
      }
      case LayerKind::affine_norm: {
        const std::uint64_t blob = r.u64();
        const std::size_t ch = in_shape[0];
        if (blob != 4 * 2 * ch)
          fail(Errc::format, "model-io", "bad-weights", "affine-norm blob size mismatch");
        AffineNormLayer l;
        l.in_shape = in_shape;
        l.scale = detail::read_f32_blob(r, ch);
        l.shift = detail::read_f32_blob(r, ch);
        m.layers.emplace_back(std::move(l));
        break;
      }
      case LayerKind::residual_add: {
        ResidualAddLayer l;
        l.in_shape = in_shape;
        l.skip_from = r.i32();
        r.u64();
        m.layers.emplace_back(std::move(l));
        break;
      }
      case LayerKind::reshape: {
        ReshapeLayer l;
        l.in_shape = in_shape;
        l.target = detail::read_shape(r);
        r.u64();
        m.layers.emplace_back(std::move(l));
        break;
      }
      default:
        fail(Errc::format, "model-io", "bad-layer-kind",
             "unknown layer kind tag " + std::to_string(static_cast<int>(kind)));
    }
  }
  if (r.remaining() != 0)
    fail(Errc::format, "model-io", "trailing-bytes", "unexpected bytes after last layer");

  m.input_shape = layer_in_shape(m.layers.front());
  validate_model(m);
  m.model_id = trailer;
  return m;
}

/// Digest the serialized form to assign model_id without touching disk.
/// load(save(m)) produces the same id: the id is a pure function of content.
inline void assign_model_id(Model& m) {
  const Bytes b = save_model(m);
  std::uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id |= static_cast<std::uint64_t>(b[b.size() - 8 + i]) << (8 * i);
  m.model_id = id;
}

inline Model load_model_file(const std::string& path) {
  return load_model(read_file_bytes(path, "model-io"));
}

inline void save_model_file(const Model& model, const std::string& path) {
  write_file_bytes(path, save_model(model), "model-io");
}

}  // namespace bpgan
