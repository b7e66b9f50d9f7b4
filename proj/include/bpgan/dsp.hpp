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
#include <complex>
#include <cstddef>
#include <vector>

#include "bpgan/tensor.hpp"

namespace bpgan {

// Short-time analysis/synthesis. Frames are windowed with a periodic Hann
// window and transformed by a radix-2 FFT; synthesis is the least-squares
// inverse (windowed overlap-add normalized by the summed squared window),
// which makes stft(istft(S)) the orthogonal projection onto consistent
// spectrograms -- the property Griffin-Lim's monotone error bound rests on.

using Cplx = std::complex<double>;

/// In-place iterative radix-2 FFT; n must be a power of two.
inline void fft_radix2(std::vector<Cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    fail(Errc::internal, "dsp", "bad-fft-size", "FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const Cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Cplx u = a[i + j];
        const Cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (Cplx& v : a) v /= static_cast<double>(n);
}

/// Periodic Hann window: w[i] = 0.5 (1 - cos(2 pi i / n)).
inline std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

/// One-sided complex spectrogram: frames x (frame_size/2 + 1) bins.
struct Spectrogram {
  std::size_t frame_size = 0;
  std::size_t hop = 0;
  std::vector<std::vector<Cplx>> frames;  // each of length frame_size/2 + 1

  std::size_t bins() const { return frame_size / 2 + 1; }
  std::size_t frame_count() const { return frames.size(); }
};

inline Spectrogram stft(const std::vector<double>& samples, std::size_t frame_size,
                        std::size_t hop) {
  if (frame_size == 0 || (frame_size & (frame_size - 1)) != 0)
    fail(Errc::io, "dsp", "bad-frame-size", "frame size must be a power of two");
  if (hop == 0 || hop > frame_size)
    fail(Errc::io, "dsp", "bad-hop", "hop must be in 1..frame_size");
  if (samples.size() < frame_size)
    fail(Errc::io, "dsp", "input-too-short",
         "need at least " + std::to_string(frame_size) + " samples, got " +
             std::to_string(samples.size()));
  const std::vector<double> window = hann_periodic(frame_size);
  const std::size_t n_frames = 1 + (samples.size() - frame_size) / hop;
  Spectrogram spec;
  spec.frame_size = frame_size;
  spec.hop = hop;
  spec.frames.resize(n_frames);
  std::vector<Cplx> buf(frame_size);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t i = 0; i < frame_size; ++i)
      buf[i] = Cplx(samples[t * hop + i] * window[i], 0.0);
    fft_radix2(buf, false);
    spec.frames[t].assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(spec.bins()));
  }
  return spec;
}

/// Least-squares synthesis: windowed overlap-add divided by the summed
/// squared window. Samples with zero window coverage come out as zero.
inline std::vector<double> istft(const Spectrogram& spec) {
  const std::size_t frame_size = spec.frame_size;
  const std::size_t hop = spec.hop;
  const std::size_t bins = spec.bins();
  if (spec.frames.empty())
    fail(Errc::io, "dsp", "empty-spectrogram", "spectrogram has no frames");
  const std::vector<double> window = hann_periodic(frame_size);
  const std::size_t total = (spec.frame_count() - 1) * hop + frame_size;
  std::vector<double> num(total, 0.0), den(total, 0.0);
  std::vector<Cplx> buf(frame_size);
  for (std::size_t t = 0; t < spec.frame_count(); ++t) {
    if (spec.frames[t].size() != bins)
      fail(Errc::format, "dsp", "bad-spectrogram", "frame bin count mismatch");
    for (std::size_t k = 0; k < bins; ++k) buf[k] = spec.frames[t][k];
    for (std::size_t k = bins; k < frame_size; ++k) buf[k] = std::conj(buf[frame_size - k]);
    fft_radix2(buf, true);
    for (std::size_t i = 0; i < frame_size; ++i) {
      num[t * hop + i] += window[i] * buf[i].real();
      den[t * hop + i] += window[i] * window[i];
    }
  }
  std::vector<double> out(total, 0.0);
  for (std::size_t i = 0; i < total; ++i)
    if (den[i] > 0.0) out[i] = num[i] / den[i];
  return out;
}

/// Magnitudes as a (bins, frames) tensor.
inline Tensor magnitude(const Spectrogram& spec) {
  Tensor mag({spec.bins(), spec.frame_count()});
  for (std::size_t t = 0; t < spec.frame_count(); ++t)
    for (std::size_t k = 0; k < spec.bins(); ++k)
      mag.data[k * spec.frame_count() + t] = std::abs(spec.frames[t][k]);
  return mag;
}

/// Iterative phase recovery from a (bins, frames) magnitude tensor with
/// zero-phase initialization. The recorded per-iteration error
/// || |STFT(x_t)| - mag ||_F / ||mag||_F is non-increasing.
inline std::vector<double> griffin_lim(const Tensor& mag, std::size_t frame_size, std::size_t hop,
                                       std::size_t iterations,
                                       std::vector<double>* error_history = nullptr) {
  if (mag.shape.size() != 2 || mag.shape[0] != frame_size / 2 + 1)
    fail(Errc::format, "dsp", "bad-spectrogram",
         "magnitude must be (bins, frames) with bins = frame_size/2 + 1, got " +
             shape_str(mag.shape));
  const std::size_t bins = mag.shape[0];
  const std::size_t n_frames = mag.shape[1];
  double mag_norm = 0.0;
  for (double v : mag.data) {
    if (!std::isfinite(v) || v < 0.0)
      fail(Errc::numeric, "dsp", "bad-magnitude", "magnitudes must be finite and nonnegative");
    mag_norm += v * v;
  }
  mag_norm = std::sqrt(mag_norm);

  Spectrogram s;
  s.frame_size = frame_size;
  s.hop = hop;
  s.frames.assign(n_frames, std::vector<Cplx>(bins));
  for (std::size_t t = 0; t < n_frames; ++t)
    for (std::size_t k = 0; k < bins; ++k)
      s.frames[t][k] = Cplx(mag.data[k * n_frames + t], 0.0);

  std::vector<double> x = istft(s);
  for (std::size_t it = 0; it < iterations; ++it) {
    const Spectrogram a = stft(x, frame_size, hop);
    if (error_history != nullptr) {
      double err = 0.0;
      for (std::size_t t = 0; t < n_frames; ++t)
        for (std::size_t k = 0; k < bins; ++k) {
          const double d = std::abs(a.frames[t][k]) - mag.data[k * n_frames + t];
          err += d * d;
        }
      error_history->push_back(mag_norm > 0.0 ? std::sqrt(err) / mag_norm : 0.0);
    }
    for (std::size_t t = 0; t < n_frames; ++t)
      for (std::size_t k = 0; k < bins; ++k) {
        const double m = std::abs(a.frames[t][k]);
        s.frames[t][k] = m > 0.0 ? a.frames[t][k] * (mag.data[k * n_frames + t] / m)
                                 : Cplx(mag.data[k * n_frames + t], 0.0);
      }
    x = istft(s);
  }
  return x;
}

}  // namespace bpgan
