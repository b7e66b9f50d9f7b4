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
#include <vector>

#include "bpgan/tensor.hpp"

namespace bpgan {

// Triangular mel filterbank on the HTK scale, mel = 2595 log10(1 + f/700),
// spanning 0 Hz to Nyquist. Filters are unnormalized triangles (peak 1).
// With many mel bins against a modest FFT resolution the lowest triangles
// can cover no bin center at all; the inversion below regularizes around
// those empty rows instead of rejecting them.

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Filter matrix of shape (n_mels, n_fft/2 + 1).
inline Tensor mel_filterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate) {
  if (n_mels == 0 || n_fft == 0 || sample_rate <= 0.0)
    fail(Errc::io, "signal-pipeline", "bad-config", "invalid mel filterbank geometry");
  const std::size_t bins = n_fft / 2 + 1;
  const double nyquist = sample_rate / 2.0;
  std::vector<double> edges(n_mels + 2);
  const double mel_max = hz_to_mel(nyquist);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  Tensor fb({n_mels, bins});
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f < hi) w = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      fb.data[m * bins + k] = w;
    }
  }
  return fb;
}

/// Mel spectrogram: fb (n_mels, bins) times magnitude (bins, frames).
inline Tensor mel_project(const Tensor& mag, const Tensor& fb) {
  if (mag.shape.size() != 2 || fb.shape.size() != 2 || fb.shape[1] != mag.shape[0])
    fail(Errc::format, "signal-pipeline", "shape-mismatch",
         "filterbank " + shape_str(fb.shape) + " does not apply to magnitude " +
             shape_str(mag.shape));
  const std::size_t n_mels = fb.shape[0], bins = fb.shape[1], frames = mag.shape[1];
  Tensor mel({n_mels, frames});
  for (std::size_t m = 0; m < n_mels; ++m)
    for (std::size_t k = 0; k < bins; ++k) {
      const double w = fb.data[m * bins + k];
      if (w == 0.0) continue;
      for (std::size_t t = 0; t < frames; ++t)
        mel.data[m * frames + t] += w * mag.data[k * frames + t];
    }
  return mel;
}

namespace detail {

/// Cholesky solve of (A + lambda I) X = B for symmetric positive
/// semidefinite A (n x n), B n x m, in place over copies.
inline std::vector<double> cholesky_solve(std::vector<double> a, std::size_t n,
                                          std::vector<double> b, std::size_t m, double lambda) {
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += lambda;
  // Lower-triangular factorization a = L L^T.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0)
          fail(Errc::numeric, "signal-pipeline", "singular-system",
               "mel inversion system is not positive definite");
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  // Forward then back substitution for each column of B.
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i * m + c];
      for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k * m + c];
      b[i * m + c] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = b[i * m + c];
      for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k * m + c];
      b[i * m + c] = s / a[i * n + i];
    }
  }
  return b;
}

}  // namespace detail

/// Precomputed inversion operator: P = F^T (F F^T + lambda I)^(-1), a
/// (bins, n_mels) matrix. The ridge term absorbs empty filterbank rows.
class MelInverter {
 public:
  explicit MelInverter(const Tensor& fb, double lambda_scale = 1e-6) : fb_shape_(fb.shape) {
    const std::size_t n_mels = fb.shape[0], bins = fb.shape[1];
    std::vector<double> gram(n_mels * n_mels, 0.0);
    double diag_max = 0.0;
    for (std::size_t i = 0; i < n_mels; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < bins; ++k) s += fb.data[i * bins + k] * fb.data[j * bins + k];
        gram[i * n_mels + j] = s;
        gram[j * n_mels + i] = s;
        if (i == j && s > diag_max) diag_max = s;
      }
    const double lambda = lambda_scale * (diag_max > 0.0 ? diag_max : 1.0);
    // Solve (G + lambda I) X = F, then P = X^T (bins x n_mels).
    std::vector<double> x = detail::cholesky_solve(std::move(gram), n_mels,
                                                   std::vector<double>(fb.data), bins, lambda);
    p_.assign(bins * n_mels, 0.0);
    for (std::size_t i = 0; i < n_mels; ++i)
      for (std::size_t k = 0; k < bins; ++k) p_[k * n_mels + i] = x[i * bins + k];
  }

  /// Linear-frequency magnitude estimate, clamped nonnegative.
  Tensor unproject(const Tensor& mel) const {
    if (mel.shape.size() != 2 || mel.shape[0] != fb_shape_[0])
      fail(Errc::format, "signal-pipeline", "shape-mismatch",
           "mel input " + shape_str(mel.shape) + " does not match filterbank " +
               shape_str(fb_shape_));
    const std::size_t n_mels = fb_shape_[0], bins = fb_shape_[1], frames = mel.shape[1];
    Tensor mag({bins, frames});
    for (std::size_t k = 0; k < bins; ++k)
      for (std::size_t m = 0; m < n_mels; ++m) {
        const double w = p_[k * n_mels + m];
        if (w == 0.0) continue;
        for (std::size_t t = 0; t < frames; ++t)
          mag.data[k * frames + t] += w * mel.data[m * frames + t];
      }
    for (double& v : mag.data)
      if (v < 0.0) v = 0.0;
    return mag;
  }

 private:
  Shape fb_shape_;
  std::vector<double> p_;  // bins x n_mels
};

/// Log-magnitude normalization into [-1, 1]: divide by the global maximum,
/// take logs, truncate the dynamic range at -r, rescale. The maximum maps to
/// exactly 1 and anything at or below max * e^(-r) to exactly -1 (the
/// comparisons run on raw values, so both anchors are exact in floating
/// point). Returns the maximum so callers can report absolute levels; the
/// clamped region is lossy by construction.
inline double log_normalize(const Tensor& mel, double r, Tensor& out) {
  if (!(r > 0.0)) fail(Errc::io, "signal-pipeline", "bad-config", "dynamic range must be positive");
  double mx = 0.0;
  for (double v : mel.data) {
    if (!std::isfinite(v) || v < 0.0)
      fail(Errc::numeric, "signal-pipeline", "bad-magnitude",
           "mel magnitudes must be finite and nonnegative");
    if (v > mx) mx = v;
  }
  if (mx == 0.0)
    fail(Errc::numeric, "signal-pipeline", "all-zero",
         "cannot normalize an all-zero mel patch");
  const double floor_value = mx * std::exp(-r);
  out = Tensor(mel.shape);
  for (std::size_t i = 0; i < mel.numel(); ++i) {
    const double v = mel.data[i];
    if (v >= mx) {
      out.data[i] = 1.0;
    } else if (v <= floor_value) {
      out.data[i] = -1.0;
    } else {
      double t = 2.0 * std::log(v / mx) / r + 1.0;
      if (t > 1.0) t = 1.0;
      if (t < -1.0) t = -1.0;
      out.data[i] = t;
    }
  }
  return mx;
}

/// Inverse of the affine/log map above; values that were clamped at -1 come
/// back at the floor max * e^(-r).
inline Tensor log_denormalize(const Tensor& patch, double r, double max_value) {
  Tensor mel(patch.shape);
  for (std::size_t i = 0; i < patch.numel(); ++i) {
    double v = patch.data[i];
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
    mel.data[i] = max_value * std::exp(r * (v - 1.0) / 2.0);
  }
  return mel;
}

}  // namespace bpgan
