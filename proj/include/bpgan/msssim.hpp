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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bpgan/tensor.hpp"

namespace bpgan {

// Multi-scale structural similarity with an analytic gradient with respect
// to the second image. Local statistics come from an 11x11 Gaussian window
// (sigma 1.5, valid region only); scales are connected by 2x2 average-pool
// downsampling. All per-scale weights are 1: the index is
//
//   l_M_bar * prod_j cs_j_bar
//
// with the per-scale means clamped at zero so the index stays in [0, 1]
// even on anti-correlated or negative-range inputs (the clamp contributes a
// zero subgradient). Multi-channel images score each channel independently
// and average.

struct MsssimConfig {
  std::size_t scales = 5;
  double dynamic_range = 2.0;  // signals are normalized to [-1, 1]
  double k1 = 0.01;
  double k2 = 0.03;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

namespace detail {

inline const std::vector<double>& gaussian_window11() {
  static const std::vector<double> w = [] {
    std::vector<double> k(11);
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double d = static_cast<double>(i) - 5.0;
      k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
      sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return w;
}

/// Valid separable filtering: out is (h-10) x (w-10).
inline void filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                         std::vector<double>& out, std::vector<double>& scratch) {
  const auto& k = gaussian_window11();
  const std::size_t wo = w - 10, ho = h - 10;
  scratch.assign(h * wo, 0.0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < wo; ++j) {
      double acc = 0.0;
      for (std::size_t u = 0; u < 11; ++u) acc += k[u] * img[i * w + j + u];
      scratch[i * wo + j] = acc;
    }
  out.assign(ho * wo, 0.0);
  for (std::size_t i = 0; i < ho; ++i)
    for (std::size_t j = 0; j < wo; ++j) {
      double acc = 0.0;
      for (std::size_t u = 0; u < 11; ++u) acc += k[u] * scratch[(i + u) * wo + j];
      out[i * wo + j] = acc;
    }
}

/// Adjoint of filter_valid: scatters a (h-10) x (w-10) map back to h x w.
inline void filter_valid_adjoint(const std::vector<double>& g, std::size_t h, std::size_t w,
                                 std::vector<double>& out, std::vector<double>& scratch) {
  const auto& k = gaussian_window11();
  const std::size_t wo = w - 10, ho = h - 10;
  scratch.assign(h * wo, 0.0);
  for (std::size_t i = 0; i < ho; ++i)
    for (std::size_t j = 0; j < wo; ++j) {
      const double gv = g[i * wo + j];
      for (std::size_t u = 0; u < 11; ++u) scratch[(i + u) * wo + j] += k[u] * gv;
    }
  out.assign(h * w, 0.0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < wo; ++j) {
      const double gv = scratch[i * wo + j];
      for (std::size_t u = 0; u < 11; ++u) out[i * w + j + u] += k[u] * gv;
    }
}

inline void avgpool2(const std::vector<double>& img, std::size_t h, std::size_t w,
                     std::vector<double>& out) {
  const std::size_t ho = h / 2, wo = w / 2;
  out.assign(ho * wo, 0.0);
  for (std::size_t i = 0; i < ho; ++i)
    for (std::size_t j = 0; j < wo; ++j)
      out[i * wo + j] = 0.25 * (img[(2 * i) * w + 2 * j] + img[(2 * i) * w + 2 * j + 1] +
                                img[(2 * i + 1) * w + 2 * j] + img[(2 * i + 1) * w + 2 * j + 1]);
}

/// Adjoint of avgpool2 onto an h x w canvas (odd trailing row/col get zero).
inline void avgpool2_adjoint(const std::vector<double>& g, std::size_t h, std::size_t w,
                             std::vector<double>& out) {
  const std::size_t ho = h / 2, wo = w / 2;
  out.assign(h * w, 0.0);
  for (std::size_t i = 0; i < ho; ++i)
    for (std::size_t j = 0; j < wo; ++j) {
      const double q = 0.25 * g[i * wo + j];
      out[(2 * i) * w + 2 * j] += q;
      out[(2 * i) * w + 2 * j + 1] += q;
      out[(2 * i + 1) * w + 2 * j] += q;
      out[(2 * i + 1) * w + 2 * j + 1] += q;
    }
}

struct ScaleStats {
  std::size_t h = 0, w = 0;      // image size at this scale
  std::vector<double> mu_x, mu_y;
  std::vector<double> a, b;      // cs = a / b per pixel
  double cs_mean = 0.0;
};

/// One channel; returns the index and (optionally) d(index)/dy.
inline double msssim_channel(const std::vector<double>& x, const std::vector<double>& y,
                             std::size_t h, std::size_t w, const MsssimConfig& cfg,
                             std::vector<double>* grad_y) {
  const double c1 = cfg.c1(), c2 = cfg.c2();
  const std::size_t m = cfg.scales;

  std::vector<std::vector<double>> xs(m), ys(m);
  xs[0] = x;
  ys[0] = y;
  std::vector<ScaleStats> stats(m);
  std::vector<double> tmp, scratch, fx2, fy2, fxy;
  std::vector<double> l_num, l_den;  // final-scale luminance terms
  double l_mean = 0.0;

  std::size_t ch = h, cw = w;
  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0) {
      avgpool2(xs[j - 1], ch, cw, xs[j]);
      avgpool2(ys[j - 1], ch, cw, ys[j]);
      ch /= 2;
      cw /= 2;
    }
    ScaleStats& s = stats[j];
    s.h = ch;
    s.w = cw;
    const std::size_t n = (ch - 10) * (cw - 10);
    filter_valid(xs[j], ch, cw, s.mu_x, scratch);
    filter_valid(ys[j], ch, cw, s.mu_y, scratch);
    tmp.resize(ch * cw);
    for (std::size_t i = 0; i < ch * cw; ++i) tmp[i] = xs[j][i] * xs[j][i];
    filter_valid(tmp, ch, cw, fx2, scratch);
    for (std::size_t i = 0; i < ch * cw; ++i) tmp[i] = ys[j][i] * ys[j][i];
    filter_valid(tmp, ch, cw, fy2, scratch);
    for (std::size_t i = 0; i < ch * cw; ++i) tmp[i] = xs[j][i] * ys[j][i];
    filter_valid(tmp, ch, cw, fxy, scratch);

    s.a.resize(n);
    s.b.resize(n);
    double cs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sxy = fxy[i] - s.mu_x[i] * s.mu_y[i];
      const double sxx = fx2[i] - s.mu_x[i] * s.mu_x[i];
      const double syy = fy2[i] - s.mu_y[i] * s.mu_y[i];
      s.a[i] = 2.0 * sxy + c2;
      s.b[i] = sxx + syy + c2;
      cs_sum += s.a[i] / s.b[i];
    }
    s.cs_mean = cs_sum / static_cast<double>(n);

    if (j + 1 == m) {
      l_num.resize(n);
      l_den.resize(n);
      double l_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        l_num[i] = 2.0 * s.mu_x[i] * s.mu_y[i] + c1;
        l_den[i] = s.mu_x[i] * s.mu_x[i] + s.mu_y[i] * s.mu_y[i] + c1;
        l_sum += l_num[i] / l_den[i];
      }
      l_mean = l_sum / static_cast<double>(n);
    }
  }

  std::vector<double> cl(m);
  for (std::size_t j = 0; j < m; ++j) cl[j] = stats[j].cs_mean > 0.0 ? stats[j].cs_mean : 0.0;
  const double ll = l_mean > 0.0 ? l_mean : 0.0;
  double index = ll;
  for (double v : cl) index *= v;

  if (grad_y == nullptr) return index;

  // d(index)/d(cs_mean_j) and d(index)/d(l_mean), honoring the zero clamps.
  std::vector<double> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
  for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] * cl[j];
  for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] * cl[j];
  std::vector<double> w_cs(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    if (stats[j].cs_mean > 0.0) w_cs[j] = ll * prefix[j] * suffix[j + 1];
  const double w_l = l_mean > 0.0 ? prefix[m] : 0.0;

  // Reverse sweep through the pyramid, accumulating each scale's
  // contribution and pushing it down through the pooling adjoints.
  std::vector<double> g, part, g1, g2, g3, adj;
  for (std::size_t j = m; j-- > 0;) {
    const ScaleStats& s = stats[j];
    const std::size_t n = s.a.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    // cs = a/b with a = 2 sigma_xy + C2, b = sigma_x^2 + sigma_y^2 + C2:
    //   d cs / d mu_y  = -2 mu_x / b + 2 mu_y a / b^2
    //   d cs / d S_yy  = -a / b^2          (S_yy = filtered y^2)
    //   d cs / d S_xy  =  2 / b            (S_xy = filtered x y)
    g1.resize(n);
    g2.resize(n);
    g3.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double b = s.b[i], ab2 = s.a[i] / (b * b);
      g1[i] = w_cs[j] * inv_n * (-2.0 * s.mu_x[i] / b + 2.0 * s.mu_y[i] * ab2);
      g2[i] = w_cs[j] * inv_n * (-ab2);
      g3[i] = w_cs[j] * inv_n * (2.0 / b);
    }
    if (j + 1 == m && w_l != 0.0) {
      // l = p/q: d l / d mu_y = (2 mu_x q - 2 mu_y p) / q^2
      for (std::size_t i = 0; i < n; ++i)
        g1[i] += w_l * inv_n * 2.0 * (s.mu_x[i] * l_den[i] - s.mu_y[i] * l_num[i]) /
                 (l_den[i] * l_den[i]);
    }
    filter_valid_adjoint(g1, s.h, s.w, part, scratch);
    filter_valid_adjoint(g2, s.h, s.w, adj, scratch);
    for (std::size_t i = 0; i < s.h * s.w; ++i) part[i] += 2.0 * ys[j][i] * adj[i];
    filter_valid_adjoint(g3, s.h, s.w, adj, scratch);
    for (std::size_t i = 0; i < s.h * s.w; ++i) part[i] += xs[j][i] * adj[i];

    if (j + 1 == m) {
      g = std::move(part);
    } else {
      for (std::size_t i = 0; i < s.h * s.w; ++i) g[i] += part[i];
    }
    if (j > 0) {
      avgpool2_adjoint(g, stats[j - 1].h, stats[j - 1].w, adj);
      g.swap(adj);
    }
  }
  *grad_y = g;
  return index;
}

}  // namespace detail

/// MS-SSIM index in [0, 1]. When grad_y is given it receives
/// d(index)/d(y) with y's shape.
inline double msssim_index(const Tensor& x, const Tensor& y, const MsssimConfig& cfg,
                           Tensor* grad_y = nullptr) {
  require_same_shape(x, y, "msssim");
  if (x.shape.size() != 2 && x.shape.size() != 3)
    fail(Errc::format, "msssim", "bad-shape",
         "expected a (H,W) or (C,H,W) image, got " + shape_str(x.shape));
  const std::size_t channels = x.shape.size() == 3 ? x.shape[0] : 1;
  const std::size_t h = x.shape[x.shape.size() - 2];
  const std::size_t w = x.shape[x.shape.size() - 1];
  if (cfg.scales == 0)
    fail(Errc::io, "msssim", "bad-config", "scale count must be positive");
  const std::size_t min_side = (static_cast<std::size_t>(1) << (cfg.scales - 1)) * 11;
  if (h < min_side || w < min_side)
    fail(Errc::format, "msssim", "image-too-small",
         "image " + shape_str(x.shape) + " too small for " + std::to_string(cfg.scales) +
             " scales; min side " + std::to_string(min_side));

  if (grad_y != nullptr) *grad_y = Tensor::zeros(y.shape);
  const std::size_t plane = h * w;
  double index_sum = 0.0;
  std::vector<double> cx(plane), cy(plane), cg;
  for (std::size_t c = 0; c < channels; ++c) {
    std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(c * plane),
              x.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * plane), cx.begin());
    std::copy(y.data.begin() + static_cast<std::ptrdiff_t>(c * plane),
              y.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * plane), cy.begin());
    index_sum += detail::msssim_channel(cx, cy, h, w, cfg, grad_y ? &cg : nullptr);
    if (grad_y != nullptr)
      for (std::size_t i = 0; i < plane; ++i)
        grad_y->data[c * plane + i] = cg[i] / static_cast<double>(channels);
  }
  return index_sum / static_cast<double>(channels);
}

}  // namespace bpgan
