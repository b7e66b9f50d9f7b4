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

#include "bpgan/bytes.hpp"

namespace bpgan {

// Bit packing is most-significant-bit first within each byte: the first bit
// written lands in bit 7 of byte 0. The last byte is zero-padded.

class BitWriter {
 public:
  void bit(int b) {
    if (nbits_ % 8 == 0) buf_.push_back(0);
    if (b) buf_.back() |= static_cast<std::uint8_t>(1u << (7 - nbits_ % 8));
    ++nbits_;
  }

  /// Writes the low `n` bits of `code`, most significant first.
  void bits(std::uint64_t code, unsigned n) {
    for (unsigned i = n; i-- > 0;) bit((code >> i) & 1u);
  }

  std::size_t bit_count() const { return nbits_; }
  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
  std::size_t nbits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t nbits, std::string module)
      : data_(data), nbits_(nbits), module_(std::move(module)) {}

  int bit() {
    if (pos_ >= nbits_)
      fail(Errc::format, module_, "truncated",
           "bit payload exhausted at bit " + std::to_string(pos_));
    const int b = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return b;
  }

  std::size_t consumed() const { return pos_; }
  std::size_t remaining() const { return nbits_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t nbits_;
  std::size_t pos_ = 0;
  std::string module_;
};

}  // namespace bpgan
