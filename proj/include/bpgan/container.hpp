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

#include "bpgan/codebook.hpp"
#include "bpgan/huffman.hpp"

namespace bpgan {

// .bpgc compressed container, little-endian throughout:
//
//   magic "BPGC" (4B) | version u8 = 1 | signal_type u8 (1 image, 2 speech)
//   signal shape: rank u8 + u32 dims      (generator output shape)
//   latent_dim u32 | model_id u64
//   codebook block:  K u16 + K f32 centers (increasing)
//   huffman block:   K u16 + K u8 code lengths
//   payload_bit_count u64 | ceil(bits / 8) payload bytes, MSB-first
//   trailer: u64 FNV-1a digest of everything before it
//
// Parsing walks the structure first so malformed fields are reported with
// the block they live in; the digest is checked last and catches byte
// corruption that still parses cleanly (including padding bits).

enum class SignalType : std::uint8_t { image = 1, speech = 2 };

struct BitstreamParts {
  SignalType signal_type = SignalType::image;
  Shape signal_shape;
  std::uint32_t latent_dim = 0;
  std::uint64_t model_id = 0;
  Codebook codebook;
  HuffmanTable table;
  std::uint64_t payload_bits = 0;
  Bytes payload;
};

inline Bytes write_container(const BitstreamParts& parts) {
  if (parts.latent_dim == 0)
    fail(Errc::format, "container", "empty-payload", "latent dimension must be positive");
  if (parts.signal_shape.empty() || parts.signal_shape.size() > 4)
    fail(Errc::format, "container", "bad-shape", "signal shape must have rank 1..4");
  if (parts.codebook.levels() != parts.table.alphabet())
    fail(Errc::format, "container", "table-mismatch",
         "codebook level count and Huffman alphabet differ");
  if (parts.payload.size() != (parts.payload_bits + 7) / 8)
    fail(Errc::format, "container", "bad-payload",
         "payload byte count does not match payload_bit_count");
  ByteWriter w;
  w.tag("BPGC");
  w.u8(1);
  w.u8(static_cast<std::uint8_t>(parts.signal_type));
  w.u8(static_cast<std::uint8_t>(parts.signal_shape.size()));
  for (std::size_t d : parts.signal_shape) w.u32(static_cast<std::uint32_t>(d));
  w.u32(parts.latent_dim);
  w.u64(parts.model_id);
  write_codebook_block(w, parts.codebook);
  write_table_block(w, parts.table);
  w.u64(parts.payload_bits);
  w.raw(parts.payload.data(), parts.payload.size());
  w.u64(fnv1a64(w.bytes()));
  return w.take();
}

inline BitstreamParts parse_container(const Bytes& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "BPGC", 4) != 0)
    fail(Errc::format, "container", "bad-magic", "not a BPGC bitstream");
  if (bytes.size() < 4 + 8)
    fail(Errc::format, "container", "truncated", "bitstream too short to hold a digest");

  ByteReader r(bytes.data(), bytes.size() - 8, "container");
  r.set_block("header");
  r.u32();  // magic, already checked
  const std::uint8_t version = r.u8();
  if (version != 1)
    fail(Errc::format, "container", "unsupported-version",
         "BPGC version " + std::to_string(version) + " not supported");
  BitstreamParts parts;
  const std::uint8_t st = r.u8();
  if (st != 1 && st != 2)
    fail(Errc::format, "container", "bad-signal-type",
         "signal type tag " + std::to_string(st) + " unknown");
  parts.signal_type = static_cast<SignalType>(st);
  const std::size_t rank = r.u8();
  if (rank == 0 || rank > 4)
    fail(Errc::format, "container", "bad-shape", "signal shape rank " + std::to_string(rank));
  parts.signal_shape.resize(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    parts.signal_shape[i] = r.u32();
    if (parts.signal_shape[i] == 0 || parts.signal_shape[i] > (1u << 24))
      fail(Errc::format, "container", "bad-shape",
           "signal dimension " + std::to_string(parts.signal_shape[i]));
  }
  parts.latent_dim = r.u32();
  if (parts.latent_dim == 0)
    fail(Errc::format, "container", "empty-payload", "latent dimension is zero");
  if (parts.latent_dim > (1u << 24))
    fail(Errc::format, "container", "bad-shape",
         "latent dimension " + std::to_string(parts.latent_dim) + " out of range");
  parts.model_id = r.u64();

  parts.codebook = read_codebook_block(r);
  parts.table = read_table_block(r);
  if (parts.table.alphabet() != parts.codebook.levels())
    fail(Errc::format, "container", "table-mismatch",
         "Huffman alphabet " + std::to_string(parts.table.alphabet()) +
             " does not match codebook levels " + std::to_string(parts.codebook.levels()));

  r.set_block("payload");
  parts.payload_bits = r.u64();
  const std::uint64_t payload_bytes = (parts.payload_bits + 7) / 8;
  if (payload_bytes != r.remaining())
    fail(Errc::format, "container", "bad-payload",
         "payload_bit_count " + std::to_string(parts.payload_bits) + " needs " +
             std::to_string(payload_bytes) + " bytes but " + std::to_string(r.remaining()) +
             " are present");
  parts.payload.resize(payload_bytes);
  if (payload_bytes > 0) r.raw(parts.payload.data(), payload_bytes);

  std::uint64_t trailer = 0;
  for (int i = 0; i < 8; ++i)
    trailer |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
  const std::uint64_t computed = fnv1a64(bytes.data(), bytes.size() - 8);
  if (computed != trailer)
    fail(Errc::format, "container", "digest-mismatch",
         "bitstream digest mismatch (stored " + std::to_string(trailer) + ", computed " +
             std::to_string(computed) + ")");
  return parts;
}

}  // namespace bpgan
