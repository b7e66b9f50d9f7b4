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
#include <utility>
#include <vector>

#include "bpgan/bitio.hpp"
#include "bpgan/container.hpp"
#include "bpgan/huffman.hpp"
#include "bpgan/objectives.hpp"
#include "bpgan/search.hpp"

namespace bpgan {

// End-to-end codec: latent search, symbol coding, container framing. The
// decompressor needs only the generator and the container — codebook and
// Huffman table travel in the header.

struct CompressResult {
  Bytes container;
  SearchReport report;
  Tensor latent;  // quantized latent, every element a codebook center
  std::uint64_t payload_bits = 0;
};

/// Bits per symbol when entropy coding is off: ceil(log2 k).
inline std::uint64_t raw_symbol_bits(std::size_t k) {
  std::uint64_t bits = 1;
  while ((std::size_t{1} << bits) < k) ++bits;
  return bits;
}

inline CompressResult compress_signal(const Tensor& target, SignalType type,
                                      const Model& generator, const Model* encoder,
                                      const Codebook& cb, const Objective& objective,
                                      const SearchConfig& cfg, bool entropy_coding = true) {
  validate_codebook(cb);
  if (generator.output_numel() != target.numel())
    fail(Errc::format, "codec", "shape-mismatch",
         "generator emits " + shape_str(generator.output_shape) + ", target is " +
             shape_str(target.shape));
  const std::size_t dim = generator.input_numel();

  const Tensor z0 = initialize(target, encoder, dim, cfg.seed);
  CompressResult out;
  std::tie(out.latent, out.report) = run_search(z0, cb, objective, cfg);

  const std::vector<std::uint32_t> symbols = symbol_indices(cb, out.latent);
  HuffmanTable table;
  if (entropy_coding) {
    std::vector<std::uint64_t> counts(cb.levels(), 0);
    for (std::uint32_t s : symbols) ++counts[s];
    table = build_table(counts);
  } else {
    table = uniform_table(cb.levels());
  }
  BitWriter bw;
  huffman_encode(table, symbols, bw);
  out.payload_bits = bw.bit_count();

  BitstreamParts parts;
  parts.signal_type = type;
  parts.signal_shape = target.shape;
  parts.latent_dim = static_cast<std::uint32_t>(dim);
  parts.model_id = generator.model_id;
  parts.codebook = cb;
  parts.table = std::move(table);
  parts.payload_bits = out.payload_bits;
  parts.payload = std::move(bw).take();
  out.container = write_container(parts);
  return out;
}

struct DecompressResult {
  Tensor signal;  // generator output, reshaped to the container's shape
  BitstreamParts parts;
};

inline DecompressResult decompress_signal(const Bytes& container, const Model& generator) {
  DecompressResult out;
  out.parts = parse_container(container);
  if (out.parts.model_id != generator.model_id)
    fail(Errc::format, "codec", "model-id-mismatch",
         "bitstream was made for model " + std::to_string(out.parts.model_id) +
             ", this generator is " + std::to_string(generator.model_id));
  if (generator.input_numel() != out.parts.latent_dim)
    fail(Errc::format, "codec", "dim-mismatch",
         "container carries " + std::to_string(out.parts.latent_dim) +
             " latent values, generator expects " + std::to_string(generator.input_numel()));
  if (generator.output_numel() != shape_numel(out.parts.signal_shape))
    fail(Errc::format, "codec", "shape-mismatch",
         "container shape " + shape_str(out.parts.signal_shape) + " does not match generator " +
             shape_str(generator.output_shape));

  BitReader br(out.parts.payload.data(), static_cast<std::size_t>(out.parts.payload_bits),
               "codec");
  const std::vector<std::uint32_t> symbols =
      huffman_decode(out.parts.table, br, out.parts.latent_dim);
  if (br.consumed() != out.parts.payload_bits)
    fail(Errc::format, "codec", "payload-excess",
         "payload declares " + std::to_string(out.parts.payload_bits) + " bits but decoding used " +
             std::to_string(br.consumed()));
  const Tensor latent = values_from_indices(out.parts.codebook, symbols);

  auto [y, tape] = forward(generator, latent);
  (void)tape;
  out.signal = y.reshaped(out.parts.signal_shape);
  return out;
}

// ---------------------------------------------------------------------------
// Rate accounting. Images are reported in bits per pixel over height*width;
// speech in kilobits per second with each patch accounted as one nominal
// second. Both payload-only and whole-container figures are kept.

struct RateReport {
  std::uint64_t payload_bits = 0;
  std::uint64_t container_bits = 0;
  double payload_rate = 0.0;
  double total_rate = 0.0;
  std::string unit;  // "bpp" or "kbps"
};

inline RateReport rate_report(SignalType type, const Shape& signal_shape,
                              std::uint64_t payload_bits, std::size_t container_bytes,
                              double speech_seconds = 1.0) {
  RateReport r;
  r.payload_bits = payload_bits;
  r.container_bits = static_cast<std::uint64_t>(container_bytes) * 8;
  if (type == SignalType::image) {
    if (signal_shape.size() < 2)
      fail(Errc::format, "codec", "bad-shape", "image rate needs a (.., height, width) shape");
    const double pixels = static_cast<double>(signal_shape[signal_shape.size() - 2]) *
                          static_cast<double>(signal_shape[signal_shape.size() - 1]);
    r.payload_rate = static_cast<double>(payload_bits) / pixels;
    r.total_rate = static_cast<double>(r.container_bits) / pixels;
    r.unit = "bpp";
  } else {
    if (!(speech_seconds > 0.0))
      fail(Errc::io, "codec", "bad-config", "speech duration must be positive");
    r.payload_rate = static_cast<double>(payload_bits) / 1000.0 / speech_seconds;
    r.total_rate = static_cast<double>(r.container_bits) / 1000.0 / speech_seconds;
    r.unit = "kbps";
  }
  return r;
}

}  // namespace bpgan
