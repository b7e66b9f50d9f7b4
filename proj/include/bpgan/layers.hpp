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
#include <variant>
#include <vector>

#include "bpgan/tensor.hpp"

namespace bpgan {

// Fixed-weight layer inventory: linear chains of these, with optional
// residual skips, cover the transpose-convolution/residual-block generator
// family this codec targets. Weights are frozen; only the input is ever
// differentiated.

enum class LayerKind : std::uint8_t {
  dense = 1,
  conv2d = 2,
  tconv2d = 3,
  relu = 4,
  leaky_relu = 5,
  tanh_act = 6,
  sigmoid = 7,
  affine_norm = 8,
  residual_add = 9,
  reshape = 10,
};

/// y = W x + b. Input of any rank is read as a flat vector of length in_dim;
/// output is rank-1. W is row-major (out_dim x in_dim).
struct DenseLayer {
  Shape in_shape;
  std::size_t out_dim = 0;
  std::vector<double> weight;  // out_dim * in_dim
  std::vector<double> bias;    // out_dim

  std::size_t in_dim() const { return shape_numel(in_shape); }
  Shape out_shape() const { return {out_dim}; }
};

struct ConvParams {
  std::size_t out_channels = 0;
  std::size_t kh = 0, kw = 0;
  std::size_t stride = 1;
  std::size_t pad = 0;
};

/// NCHW single-sample convolution, zero padding, floor output size.
/// weight layout [out][in][kh][kw], bias per output channel.
struct Conv2dLayer {
  Shape in_shape;  // (C, H, W)
  ConvParams p;
  std::vector<double> weight;
  std::vector<double> bias;

  Shape out_shape() const {
    const std::size_t h = in_shape[1] + 2 * p.pad - p.kh;
    const std::size_t w = in_shape[2] + 2 * p.pad - p.kw;
    return {p.out_channels, h / p.stride + 1, w / p.stride + 1};
  }
};

/// Adjoint of Conv2dLayer with the same stride/padding: scatter-add of
/// weighted kernels. Output H = (H_in - 1) * stride - 2 * pad + kh.
/// weight layout [in][out][kh][kw], bias per output channel.
struct TConv2dLayer {
  Shape in_shape;  // (C, H, W)
  ConvParams p;
  std::vector<double> weight;
  std::vector<double> bias;

  Shape out_shape() const {
    const std::size_t h = (in_shape[1] - 1) * p.stride + p.kh - 2 * p.pad;
    const std::size_t w = (in_shape[2] - 1) * p.stride + p.kw - 2 * p.pad;
    return {p.out_channels, h, w};
  }
};

struct ReluLayer {
  Shape in_shape;
  Shape out_shape() const { return in_shape; }
};

struct LeakyReluLayer {
  Shape in_shape;
  double slope = 0.2;
  Shape out_shape() const { return in_shape; }
};

struct TanhLayer {
  Shape in_shape;
  Shape out_shape() const { return in_shape; }
};

struct SigmoidLayer {
  Shape in_shape;
  Shape out_shape() const { return in_shape; }
};

/// Per-channel y = scale[c] * x + shift[c], broadcast over trailing dims.
/// Folded batch-norm statistics land here. scale entries must be nonzero.
struct AffineNormLayer {
  Shape in_shape;
  std::vector<double> scale;  // size in_shape[0]
  std::vector<double> shift;  // size in_shape[0]
  Shape out_shape() const { return in_shape; }
};

/// y = x + activation(skip_from). skip_from = -1 addresses the model input,
/// k >= 0 the output of layer k (which must precede this layer).
struct ResidualAddLayer {
  Shape in_shape;
  int skip_from = -1;
  Shape out_shape() const { return in_shape; }
};

struct ReshapeLayer {
  Shape in_shape;
  Shape target;
  Shape out_shape() const { return target; }
};

using LayerSpec = std::variant<DenseLayer, Conv2dLayer, TConv2dLayer, ReluLayer, LeakyReluLayer,
                               TanhLayer, SigmoidLayer, AffineNormLayer, ResidualAddLayer,
                               ReshapeLayer>;

inline LayerKind layer_kind(const LayerSpec& layer) {
  return std::visit(
      [](const auto& l) -> LayerKind {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, DenseLayer>) return LayerKind::dense;
        if constexpr (std::is_same_v<T, Conv2dLayer>) return LayerKind::conv2d;
        if constexpr (std::is_same_v<T, TConv2dLayer>) return LayerKind::tconv2d;
        if constexpr (std::is_same_v<T, ReluLayer>) return LayerKind::relu;
        if constexpr (std::is_same_v<T, LeakyReluLayer>) return LayerKind::leaky_relu;
        if constexpr (std::is_same_v<T, TanhLayer>) return LayerKind::tanh_act;
        if constexpr (std::is_same_v<T, SigmoidLayer>) return LayerKind::sigmoid;
        if constexpr (std::is_same_v<T, AffineNormLayer>) return LayerKind::affine_norm;
        if constexpr (std::is_same_v<T, ResidualAddLayer>) return LayerKind::residual_add;
        if constexpr (std::is_same_v<T, ReshapeLayer>) return LayerKind::reshape;
      },
      layer);
}

inline const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::tconv2d: return "transposed-conv2d";
    case LayerKind::relu: return "relu";
    case LayerKind::leaky_relu: return "leaky-relu";
    case LayerKind::tanh_act: return "tanh";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::affine_norm: return "frozen-affine-norm";
    case LayerKind::residual_add: return "residual-add";
    case LayerKind::reshape: return "reshape";
  }
  return "unknown";
}

inline Shape layer_in_shape(const LayerSpec& layer) {
  return std::visit([](const auto& l) { return l.in_shape; }, layer);
}

inline Shape layer_out_shape(const LayerSpec& layer) {
  return std::visit([](const auto& l) { return l.out_shape(); }, layer);
}

namespace detail {

inline Tensor dense_forward(const DenseLayer& l, const Tensor& x) {
  Tensor y({l.out_dim});
  const std::size_t in = l.in_dim();
  for (std::size_t o = 0; o < l.out_dim; ++o) {
    double acc = l.bias[o];
    const double* wrow = &l.weight[o * in];
    for (std::size_t i = 0; i < in; ++i) acc += wrow[i] * x.data[i];
    y.data[o] = acc;
  }
  return y;
}

inline Tensor dense_backward(const DenseLayer& l, const Tensor& g) {
  Tensor dx(l.in_shape);
  const std::size_t in = l.in_dim();
  for (std::size_t o = 0; o < l.out_dim; ++o) {
    const double go = g.data[o];
    const double* wrow = &l.weight[o * in];
    for (std::size_t i = 0; i < in; ++i) dx.data[i] += wrow[i] * go;
  }
  return dx;
}

inline Tensor conv2d_forward(const Conv2dLayer& l, const Tensor& x) {
  const std::size_t C = l.in_shape[0], H = l.in_shape[1], W = l.in_shape[2];
  const Shape os = l.out_shape();
  const std::size_t F = os[0], HO = os[1], WO = os[2];
  const std::size_t s = l.p.stride;
  const long pad = static_cast<long>(l.p.pad);
  Tensor y(os);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t i = 0; i < HO; ++i) {
      for (std::size_t j = 0; j < WO; ++j) {
        double acc = l.bias[f];
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t u = 0; u < l.p.kh; ++u) {
            const long ii = static_cast<long>(i * s + u) - pad;
            if (ii < 0 || ii >= static_cast<long>(H)) continue;
            for (std::size_t v = 0; v < l.p.kw; ++v) {
              const long jj = static_cast<long>(j * s + v) - pad;
              if (jj < 0 || jj >= static_cast<long>(W)) continue;
              acc += l.weight[((f * C + c) * l.p.kh + u) * l.p.kw + v] *
                     x.data[(c * H + static_cast<std::size_t>(ii)) * W + static_cast<std::size_t>(jj)];
            }
          }
        }
        y.data[(f * HO + i) * WO + j] = acc;
      }
    }
  }
  return y;
}

inline Tensor conv2d_backward(const Conv2dLayer& l, const Tensor& g) {
  const std::size_t C = l.in_shape[0], H = l.in_shape[1], W = l.in_shape[2];
  const Shape os = l.out_shape();
  const std::size_t F = os[0], HO = os[1], WO = os[2];
  const std::size_t s = l.p.stride;
  const long pad = static_cast<long>(l.p.pad);
  Tensor dx(l.in_shape);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t i = 0; i < HO; ++i) {
      for (std::size_t j = 0; j < WO; ++j) {
        const double go = g.data[(f * HO + i) * WO + j];
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t u = 0; u < l.p.kh; ++u) {
            const long ii = static_cast<long>(i * s + u) - pad;
            if (ii < 0 || ii >= static_cast<long>(H)) continue;
            for (std::size_t v = 0; v < l.p.kw; ++v) {
              const long jj = static_cast<long>(j * s + v) - pad;
              if (jj < 0 || jj >= static_cast<long>(W)) continue;
              dx.data[(c * H + static_cast<std::size_t>(ii)) * W + static_cast<std::size_t>(jj)] +=
                  go * l.weight[((f * C + c) * l.p.kh + u) * l.p.kw + v];
            }
          }
        }
      }
    }
  }
  return dx;
}

inline Tensor tconv2d_forward(const TConv2dLayer& l, const Tensor& x) {
  const std::size_t C = l.in_shape[0], H = l.in_shape[1], W = l.in_shape[2];
  const Shape os = l.out_shape();
  const std::size_t F = os[0], HO = os[1], WO = os[2];
  const std::size_t s = l.p.stride;
  const long pad = static_cast<long>(l.p.pad);
  Tensor y(os);
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t n = 0; n < HO * WO; ++n) y.data[f * HO * WO + n] = l.bias[f];
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        const double xv = x.data[(c * H + i) * W + j];
        for (std::size_t f = 0; f < F; ++f) {
          for (std::size_t u = 0; u < l.p.kh; ++u) {
            const long oi = static_cast<long>(i * s + u) - pad;
            if (oi < 0 || oi >= static_cast<long>(HO)) continue;
            for (std::size_t v = 0; v < l.p.kw; ++v) {
              const long oj = static_cast<long>(j * s + v) - pad;
              if (oj < 0 || oj >= static_cast<long>(WO)) continue;
              y.data[(f * HO + static_cast<std::size_t>(oi)) * WO + static_cast<std::size_t>(oj)] +=
                  xv * l.weight[((c * F + f) * l.p.kh + u) * l.p.kw + v];
            }
          }
        }
      }
    }
  }
  return y;
}

inline Tensor tconv2d_backward(const TConv2dLayer& l, const Tensor& g) {
  const std::size_t C = l.in_shape[0], H = l.in_shape[1], W = l.in_shape[2];
  const Shape os = l.out_shape();
  const std::size_t F = os[0], HO = os[1], WO = os[2];
  const std::size_t s = l.p.stride;
  const long pad = static_cast<long>(l.p.pad);
  Tensor dx(l.in_shape);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        double acc = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
          for (std::size_t u = 0; u < l.p.kh; ++u) {
            const long oi = static_cast<long>(i * s + u) - pad;
            if (oi < 0 || oi >= static_cast<long>(HO)) continue;
            for (std::size_t v = 0; v < l.p.kw; ++v) {
              const long oj = static_cast<long>(j * s + v) - pad;
              if (oj < 0 || oj >= static_cast<long>(WO)) continue;
              acc += g.data[(f * HO + static_cast<std::size_t>(oi)) * WO + static_cast<std::size_t>(oj)] *
                     l.weight[((c * F + f) * l.p.kh + u) * l.p.kw + v];
            }
          }
        }
        dx.data[(c * H + i) * W + j] = acc;
      }
    }
  }
  return dx;
}

}  // namespace detail

/// Forward application of one layer. `skip` must be the activation addressed
/// by residual_add layers and is ignored otherwise.
inline Tensor layer_forward(const LayerSpec& layer, const Tensor& x, const Tensor* skip = nullptr) {
  return std::visit(
      [&](const auto& l) -> Tensor {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, DenseLayer>) {
          return detail::dense_forward(l, x);
        } else if constexpr (std::is_same_v<T, Conv2dLayer>) {
          return detail::conv2d_forward(l, x);
        } else if constexpr (std::is_same_v<T, TConv2dLayer>) {
          return detail::tconv2d_forward(l, x);
        } else if constexpr (std::is_same_v<T, ReluLayer>) {
          Tensor y = x;
          for (double& v : y.data) v = v > 0.0 ? v : 0.0;
          return y;
        } else if constexpr (std::is_same_v<T, LeakyReluLayer>) {
          Tensor y = x;
          for (double& v : y.data) v = v > 0.0 ? v : l.slope * v;
          return y;
        } else if constexpr (std::is_same_v<T, TanhLayer>) {
          Tensor y = x;
          for (double& v : y.data) v = std::tanh(v);
          return y;
        } else if constexpr (std::is_same_v<T, SigmoidLayer>) {
          Tensor y = x;
          for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
          return y;
        } else if constexpr (std::is_same_v<T, AffineNormLayer>) {
          Tensor y = x;
          const std::size_t ch = l.in_shape[0];
          const std::size_t inner = y.numel() / ch;
          for (std::size_t c = 0; c < ch; ++c)
            for (std::size_t i = 0; i < inner; ++i)
              y.data[c * inner + i] = l.scale[c] * y.data[c * inner + i] + l.shift[c];
          return y;
        } else if constexpr (std::is_same_v<T, ResidualAddLayer>) {
          Tensor y = x;
          for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += skip->data[i];
          return y;
        } else {  // ReshapeLayer
          return x.reshaped(l.target);
        }
      },
      layer);
}

/// Gradient of one layer with respect to its direct input. x_in/y_out are the
/// cached forward activations. For residual_add the skip branch is handled by
/// the caller (the incoming gradient also flows to the skip source unchanged).
/// Piecewise-linear activations take the zero-value branch at the kink:
/// relu'(0) = 0, leaky'(0) = slope.
inline Tensor layer_backward(const LayerSpec& layer, const Tensor& g, const Tensor& x_in,
                             const Tensor& y_out) {
  return std::visit(
      [&](const auto& l) -> Tensor {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, DenseLayer>) {
          return detail::dense_backward(l, g);
        } else if constexpr (std::is_same_v<T, Conv2dLayer>) {
          return detail::conv2d_backward(l, g);
        } else if constexpr (std::is_same_v<T, TConv2dLayer>) {
          return detail::tconv2d_backward(l, g);
        } else if constexpr (std::is_same_v<T, ReluLayer>) {
          Tensor dx = g;
          for (std::size_t i = 0; i < dx.data.size(); ++i)
            if (x_in.data[i] <= 0.0) dx.data[i] = 0.0;
          return dx;
        } else if constexpr (std::is_same_v<T, LeakyReluLayer>) {
          Tensor dx = g;
          for (std::size_t i = 0; i < dx.data.size(); ++i)
            if (x_in.data[i] <= 0.0) dx.data[i] *= l.slope;
          return dx;
        } else if constexpr (std::is_same_v<T, TanhLayer>) {
          Tensor dx = g;
          for (std::size_t i = 0; i < dx.data.size(); ++i)
            dx.data[i] *= 1.0 - y_out.data[i] * y_out.data[i];
          return dx;
        } else if constexpr (std::is_same_v<T, SigmoidLayer>) {
          Tensor dx = g;
          for (std::size_t i = 0; i < dx.data.size(); ++i)
            dx.data[i] *= y_out.data[i] * (1.0 - y_out.data[i]);
          return dx;
        } else if constexpr (std::is_same_v<T, AffineNormLayer>) {
          Tensor dx = g;
          const std::size_t ch = l.in_shape[0];
          const std::size_t inner = dx.numel() / ch;
          for (std::size_t c = 0; c < ch; ++c)
            for (std::size_t i = 0; i < inner; ++i) dx.data[c * inner + i] *= l.scale[c];
          return dx;
        } else if constexpr (std::is_same_v<T, ResidualAddLayer>) {
          return g;  // identity on the chain branch
        } else {  // ReshapeLayer
          return g.reshaped(l.in_shape);
        }
      },
      layer);
}

}  // namespace bpgan
