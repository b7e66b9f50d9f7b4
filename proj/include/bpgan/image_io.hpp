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

#include "bpgan/bytes.hpp"
#include "bpgan/tensor.hpp"

namespace bpgan {

// Binary PNM readers and writers (P5 grayscale, P6 RGB), 8-bit only. Pixels
// travel as planar tensors shaped (channels, height, width) with values in
// [0, 255] so the rest of the pipeline never touches interleaved bytes.

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;  // 1 or 3
  std::vector<std::uint8_t> pixels;  // interleaved rows
};

namespace detail {

inline void skip_pnm_space(const Bytes& b, std::size_t& pos) {
  while (pos < b.size()) {
    const char c = static_cast<char>(b[pos]);
    if (c == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
}

inline std::size_t read_pnm_int(const Bytes& b, std::size_t& pos, const char* what) {
  skip_pnm_space(b, pos);
  if (pos >= b.size() || b[pos] < '0' || b[pos] > '9')
    fail(Errc::format, "image-io", "bad-header",
         std::string("expected ") + what + " at byte " + std::to_string(pos));
  std::size_t value = 0;
  while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
    value = value * 10 + static_cast<std::size_t>(b[pos] - '0');
    if (value > (1u << 24))
      fail(Errc::format, "image-io", "bad-header",
           std::string(what) + " out of range at byte " + std::to_string(pos));
    ++pos;
  }
  return value;
}

}  // namespace detail

inline Image decode_pnm(const Bytes& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    fail(Errc::format, "image-io", "bad-magic", "not a binary PGM/PPM file");
  Image img;
  img.channels = bytes[1] == '6' ? 3 : 1;
  std::size_t pos = 2;
  img.width = detail::read_pnm_int(bytes, pos, "width");
  img.height = detail::read_pnm_int(bytes, pos, "height");
  const std::size_t maxval = detail::read_pnm_int(bytes, pos, "maxval");
  if (img.width == 0 || img.height == 0)
    fail(Errc::format, "image-io", "bad-header", "image dimensions must be positive");
  if (maxval != 255)
    fail(Errc::format, "image-io", "bad-header",
         "only 8-bit images are supported, got maxval " + std::to_string(maxval));
  if (pos >= bytes.size() ||
      !(bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\r' || bytes[pos] == '\n'))
    fail(Errc::format, "image-io", "bad-header",
         "expected whitespace after maxval at byte " + std::to_string(pos));
  ++pos;  // single whitespace byte, then raster
  const std::size_t need = img.width * img.height * img.channels;
  if (bytes.size() - pos < need)
    fail(Errc::format, "image-io", "truncated",
         "raster needs " + std::to_string(need) + " bytes, found " +
             std::to_string(bytes.size() - pos));
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
  return img;
}

inline Bytes encode_pnm(const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    fail(Errc::io, "image-io", "bad-image", "only 1- or 3-channel images can be written");
  if (img.pixels.size() != img.width * img.height * img.channels)
    fail(Errc::io, "image-io", "bad-image", "pixel buffer does not match dimensions");
  std::string header = std::string(img.channels == 3 ? "P6" : "P5") + "\n" +
                       std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

inline Image load_image_file(const std::string& path) {
  return decode_pnm(read_file_bytes(path, "image-io"));
}

inline void save_image_file(const std::string& path, const Image& img) {
  write_file_bytes(path, encode_pnm(img), "image-io");
}

/// Planar (C, H, W) tensor with values in [0, 255].
inline Tensor image_to_tensor(const Image& img) {
  Tensor t({img.channels, img.height, img.width});
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < img.channels; ++c)
        t.data[(c * img.height + y) * img.width + x] =
            static_cast<double>(img.pixels[(y * img.width + x) * img.channels + c]);
  return t;
}

/// Inverse of image_to_tensor; values are clamped to [0, 255] and rounded.
inline Image tensor_to_image(const Tensor& t) {
  if (t.shape.size() != 3 || (t.shape[0] != 1 && t.shape[0] != 3))
    fail(Errc::format, "image-io", "bad-shape",
         "expected a (1|3, height, width) tensor, got " + shape_str(t.shape));
  Image img;
  img.channels = t.shape[0];
  img.height = t.shape[1];
  img.width = t.shape[2];
  img.pixels.resize(img.channels * img.height * img.width);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < img.channels; ++c) {
        double v = t.data[(c * img.height + y) * img.width + x];
        v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
        img.pixels[(y * img.width + x) * img.channels + c] =
            static_cast<std::uint8_t>(v + 0.5);
      }
  return img;
}

}  // namespace bpgan
