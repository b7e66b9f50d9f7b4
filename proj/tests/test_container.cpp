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

#include "helpers.hpp"

using namespace bpgan;
using bpgan_test::expect_error;

namespace {

BitstreamParts sample_parts(std::uint64_t seed) {
  Rng rng(seed);
  BitstreamParts parts;
  parts.signal_type = rng.below(2) == 0 ? SignalType::image : SignalType::speech;
  const std::size_t rank = 1 + rng.below(4);
  for (std::size_t i = 0; i < rank; ++i) parts.signal_shape.push_back(1 + rng.below(64));
  parts.latent_dim = static_cast<std::uint32_t>(1 + rng.below(512));
  parts.model_id = rng.next_u64();

  const std::size_t k = 2 + rng.below(14);
  double c = rng.uniform(-2.0, -1.0);
  for (std::size_t i = 0; i < k; ++i) {
    parts.codebook.centers.push_back(static_cast<double>(static_cast<float>(c)));
    c += 0.1 + rng.uniform();
  }
  std::vector<std::uint64_t> counts(k);
  for (auto& v : counts) v = 1 + rng.below(40);
  parts.table = build_table(counts);

  parts.payload_bits = 1 + rng.below(200);
  parts.payload.resize((parts.payload_bits + 7) / 8);
  for (auto& b : parts.payload) b = static_cast<std::uint8_t>(rng.below(256));
  // Padding bits beyond payload_bits must be zero for writer/parser symmetry
  // with real encoders; the container itself does not care, so leave them.
  return parts;
}

}  // namespace

TEST_CASE("containers round trip every field") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const BitstreamParts parts = sample_parts(seed);
    const Bytes bytes = write_container(parts);
    const BitstreamParts back = parse_container(bytes);

    CHECK(back.signal_type == parts.signal_type);
    CHECK(back.signal_shape == parts.signal_shape);
    CHECK(back.latent_dim == parts.latent_dim);
    CHECK(back.model_id == parts.model_id);
    CHECK(back.codebook.centers == parts.codebook.centers);
    CHECK(back.table.lengths == parts.table.lengths);
    CHECK(back.table.codes == parts.table.codes);
    CHECK(back.payload_bits == parts.payload_bits);
    CHECK(back.payload == parts.payload);

    // Serialization is deterministic.
    CHECK(write_container(parts) == bytes);
  }
}

TEST_CASE("writer validates its input") {
  BitstreamParts parts = sample_parts(3);
  SECTION("zero latent dimension") {
    parts.latent_dim = 0;
    CHECK(expect_error([&] { (void)write_container(parts); }).reason() == "empty-payload");
  }
  SECTION("rank out of range") {
    parts.signal_shape.assign(5, 4);
    CHECK(expect_error([&] { (void)write_container(parts); }).reason() == "bad-shape");
  }
  SECTION("alphabet/levels mismatch") {
    parts.table = build_table(std::vector<std::uint64_t>(parts.codebook.levels() + 1, 1));
    CHECK(expect_error([&] { (void)write_container(parts); }).reason() == "table-mismatch");
  }
  SECTION("payload byte count off by one") {
    parts.payload.push_back(0);
    CHECK(expect_error([&] { (void)write_container(parts); }).reason() == "bad-payload");
  }
}

TEST_CASE("parser reports the failing block") {
  const BitstreamParts parts = sample_parts(4);
  const Bytes good = write_container(parts);

  SECTION("bad magic") {
    Bytes b = good;
    b[1] = 'X';
    CHECK(expect_error([&] { (void)parse_container(b); }).reason() == "bad-magic");
  }
  SECTION("unsupported version") {
    Bytes b = good;
    b[4] = 9;  // structural checks precede the digest check
    CHECK(expect_error([&] { (void)parse_container(b); }).reason() == "unsupported-version");
  }
  SECTION("unknown signal type") {
    Bytes b = good;
    b[5] = 7;
    CHECK(expect_error([&] { (void)parse_container(b); }).reason() == "bad-signal-type");
  }
  SECTION("codebook corruption names its block") {
    // Overwrite the first center with the largest finite f32 so the
    // strictly-increasing check trips inside the codebook block.
    const std::size_t rank = parts.signal_shape.size();
    const std::size_t center0 = 4 + 1 + 1 + 1 + 4 * rank + 4 + 8 + 2;
    Bytes b = good;
    b[center0 + 0] = 0xFF;
    b[center0 + 1] = 0xFF;
    b[center0 + 2] = 0x7F;
    b[center0 + 3] = 0x7F;
    const Error e = expect_error([&] { (void)parse_container(b); });
    CHECK(e.reason() == "bad-center");
    CHECK(e.module() == "quantization");
  }
  SECTION("payload truncation") {
    Bytes b(good.begin(), good.end() - 9);  // drop the digest and one payload byte
    const Error e = expect_error([&] { (void)parse_container(b); });
    const bool structural = e.reason() == "bad-payload" || e.reason() == "truncated";
    CHECK(structural);
  }
  SECTION("flipped digest byte") {
    Bytes b = good;
    b.back() ^= 0x01;
    CHECK(expect_error([&] { (void)parse_container(b); }).reason() == "digest-mismatch");
  }
  SECTION("flipped padding bit") {
    // The final payload byte's padding bits are covered by the digest too.
    Bytes b = good;
    b[b.size() - 9] ^= 0x01;
    CHECK(expect_error([&] { (void)parse_container(b); }).reason() == "digest-mismatch");
  }
}

TEST_CASE("any single-byte corruption is detected") {
  const BitstreamParts parts = sample_parts(5);
  const Bytes good = write_container(parts);
  REQUIRE_NOTHROW(parse_container(good));

  Rng rng(55);
  int caught = 0;
  for (int rep = 0; rep < 60; ++rep) {
    Bytes b = good;
    const std::size_t pos = rng.below(b.size());
    const auto flip = static_cast<std::uint8_t>(1 + rng.below(255));
    b[pos] ^= flip;
    try {
      (void)parse_container(b);
    } catch (const Error&) {
      ++caught;
    }
  }
  // The digest trailer covers every byte, so nothing slips through.
  CHECK(caught == 60);
}
