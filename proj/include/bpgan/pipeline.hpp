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

#include "bpgan/dsp.hpp"
#include "bpgan/image_io.hpp"
#include "bpgan/mel.hpp"
#include "bpgan/tensor.hpp"

namespace bpgan {

// Pre/post-processing that turns raw media into the [-1, 1] tensors the
// generator speaks, and back.

// ---------------------------------------------------------------------------
// Images

struct ImagePipelineConfig {
  std::size_t target_width = 768;
  std::size_t target_height = 512;
  std::size_t channels = 3;
};

/// Bilinear resampling of a (C, H, W) tensor, half-pixel sample centers.
inline Tensor bilinear_resize(const Tensor& src, std::size_t out_h, std::size_t out_w) {
  if (src.shape.size() != 3)
    fail(Errc::format, "signal-pipeline", "bad-shape",
         "expected (channels, height, width), got " + shape_str(src.shape));
  if (out_h == 0 || out_w == 0)
    fail(Errc::io, "signal-pipeline", "bad-config", "resize target must be positive");
  const std::size_t ch = src.shape[0], in_h = src.shape[1], in_w = src.shape[2];
  Tensor out({ch, out_h, out_w});
  const double sy = static_cast<double>(in_h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(in_w) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
    if (fy < 0.0) fy = 0.0;
    if (fy > static_cast<double>(in_h - 1)) fy = static_cast<double>(in_h - 1);
    const std::size_t y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = y0 + 1 < in_h ? y0 + 1 : y0;
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
      if (fx < 0.0) fx = 0.0;
      if (fx > static_cast<double>(in_w - 1)) fx = static_cast<double>(in_w - 1);
      const std::size_t x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = x0 + 1 < in_w ? x0 + 1 : x0;
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < ch; ++c) {
        const double* p = src.data.data() + c * in_h * in_w;
        const double top = p[y0 * in_w + x0] * (1.0 - wx) + p[y0 * in_w + x1] * wx;
        const double bot = p[y1 * in_w + x0] * (1.0 - wx) + p[y1 * in_w + x1] * wx;
        out.data[(c * out_h + y) * out_w + x] = top * (1.0 - wy) + bot * wy;
      }
    }
  }
  return out;
}

namespace detail {

inline Tensor match_channels(const Tensor& t, std::size_t channels) {
  const std::size_t ch = t.shape[0], h = t.shape[1], w = t.shape[2];
  if (ch == channels) return t;
  Tensor out({channels, h, w});
  if (ch == 1) {
    for (std::size_t c = 0; c < channels; ++c)
      std::copy(t.data.begin(), t.data.begin() + static_cast<std::ptrdiff_t>(h * w),
                out.data.begin() + static_cast<std::ptrdiff_t>(c * h * w));
  } else if (channels == 1) {
    for (std::size_t i = 0; i < h * w; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < ch; ++c) s += t.data[c * h * w + i];
      out.data[i] = s / static_cast<double>(ch);
    }
  } else {
    fail(Errc::format, "signal-pipeline", "bad-shape",
         "cannot convert " + std::to_string(ch) + "-channel image to " +
             std::to_string(channels) + " channels");
  }
  return out;
}

}  // namespace detail

/// File pixels ([0,255], any supported channel count) to the generator's
/// value range [-1, 1] at the configured resolution.
inline Tensor prepare_image(const Image& img, const ImagePipelineConfig& cfg) {
  if (cfg.channels != 1 && cfg.channels != 3)
    fail(Errc::io, "signal-pipeline", "bad-config", "pipeline channels must be 1 or 3");
  Tensor t = detail::match_channels(image_to_tensor(img), cfg.channels);
  if (t.shape[1] != cfg.target_height || t.shape[2] != cfg.target_width)
    t = bilinear_resize(t, cfg.target_height, cfg.target_width);
  for (double& v : t.data) v = v / 127.5 - 1.0;
  return t;
}

/// The decoder-side inverse: [-1, 1] back to pixel values.
inline Image finish_image(const Tensor& signal) {
  Tensor t(signal.shape);
  for (std::size_t i = 0; i < signal.numel(); ++i) t.data[i] = (signal.data[i] + 1.0) * 127.5;
  return tensor_to_image(t);
}

// ---------------------------------------------------------------------------
// Speech

struct SpeechPipelineConfig {
  std::size_t sample_rate = 16000;
  std::size_t frame_size = 512;  // 75% overlap against the stride
  std::size_t stride = 128;
  std::size_t mel_bins = 128;
  std::size_t patch_frames = 128;
  double dynamic_range = 8.0;  // log-magnitude clamp depth r
  std::size_t griffin_lim_iters = 60;
};

inline void check_speech_config(const SpeechPipelineConfig& cfg) {
  if (cfg.sample_rate == 0 || cfg.frame_size == 0 || cfg.stride == 0 || cfg.mel_bins == 0 ||
      cfg.patch_frames == 0 || !(cfg.dynamic_range > 0.0))
    fail(Errc::io, "signal-pipeline", "bad-config", "speech pipeline fields must be positive");
  if (cfg.stride > cfg.frame_size)
    fail(Errc::io, "signal-pipeline", "bad-config", "stride must not exceed frame size");
}

/// Samples needed to analyze one patch (first frame plus hops).
inline std::size_t patch_window_samples(const SpeechPipelineConfig& cfg) {
  return cfg.frame_size + (cfg.patch_frames - 1) * cfg.stride;
}

/// Hop coverage of one patch: patch_frames * stride samples. At the default
/// geometry this is 128 * 128 = 16384 samples, accounted as one nominal
/// second of audio for rate reporting.
inline std::size_t patch_hop_samples(const SpeechPipelineConfig& cfg) {
  return cfg.patch_frames * cfg.stride;
}

inline double patch_nominal_seconds(const SpeechPipelineConfig&) { return 1.0; }

struct SpeechPatch {
  Tensor patch;      // (1, mel_bins, patch_frames) in [-1, 1]
  double max_value;  // pre-normalization magnitude peak
};

/// First analysis patch of a waveform: STFT magnitude, mel projection,
/// log normalization.
inline SpeechPatch extract_speech_patch(const std::vector<double>& samples,
                                        const SpeechPipelineConfig& cfg) {
  check_speech_config(cfg);
  const std::size_t need = patch_window_samples(cfg);
  if (samples.size() < need)
    fail(Errc::format, "signal-pipeline", "input-too-short",
         "patch needs " + std::to_string(need) + " samples, got " +
             std::to_string(samples.size()));
  std::vector<double> window(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(need));
  const Spectrogram spec = stft(window, cfg.frame_size, cfg.stride);
  const Tensor mag = magnitude(spec);
  const Tensor fb =
      mel_filterbank(cfg.mel_bins, cfg.frame_size, static_cast<double>(cfg.sample_rate));
  const Tensor mel = mel_project(mag, fb);
  SpeechPatch out;
  Tensor normalized;
  out.max_value = log_normalize(mel, cfg.dynamic_range, normalized);
  out.patch = normalized.reshaped({1, cfg.mel_bins, cfg.patch_frames});
  return out;
}

/// Inverse path: denormalize, lift mel back to linear frequency, recover
/// phase with Griffin-Lim. Returns patch_window_samples() samples.
inline std::vector<double> synthesize_speech_patch(const Tensor& patch, double max_value,
                                                   const SpeechPipelineConfig& cfg) {
  check_speech_config(cfg);
  const Shape want{1, cfg.mel_bins, cfg.patch_frames};
  if (patch.shape != want && patch.shape != Shape{cfg.mel_bins, cfg.patch_frames})
    fail(Errc::format, "signal-pipeline", "bad-shape",
         "expected patch shaped " + shape_str(want) + ", got " + shape_str(patch.shape));
  if (!(max_value > 0.0) || !std::isfinite(max_value))
    fail(Errc::numeric, "signal-pipeline", "bad-magnitude", "patch maximum must be positive");
  const Tensor mel =
      log_denormalize(patch.reshaped({cfg.mel_bins, cfg.patch_frames}), cfg.dynamic_range,
                      max_value);
  const Tensor fb =
      mel_filterbank(cfg.mel_bins, cfg.frame_size, static_cast<double>(cfg.sample_rate));
  const MelInverter inverter(fb);
  const Tensor mag = inverter.unproject(mel);
  return griffin_lim(mag, cfg.frame_size, cfg.stride, cfg.griffin_lim_iters);
}

}  // namespace bpgan
