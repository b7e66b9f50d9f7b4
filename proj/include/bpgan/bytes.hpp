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
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "bpgan/error.hpp"

namespace bpgan {

using Bytes = std::vector<std::uint8_t>;

/// 64-bit FNV-1a over a byte range.
inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n,
                             std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const Bytes& b) { return fnv1a64(b.data(), b.size()); }

/// Little-endian append-only byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void raw(const std::uint8_t* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void tag(const char (&magic)[5]) { raw(reinterpret_cast<const std::uint8_t*>(magic), 4); }

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  Bytes buf_;
};

/// Bounds-checked little-endian reader. Out-of-range reads raise a format
/// error naming the block being parsed (set via set_block()).
class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t n, std::string module)
      : data_(data), size_(n), module_(std::move(module)) {}
  explicit ByteReader(const Bytes& b, std::string module)
      : ByteReader(b.data(), b.size(), std::move(module)) {}

  void set_block(std::string name) { block_ = std::move(name); }
  const std::string& block() const { return block_; }
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                      static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void raw(std::uint8_t* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  std::string tag(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_) + pos_, n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  void need(std::size_t n) {
    if (pos_ + n > size_)
      fail(Errc::format, module_, "truncated",
           "unexpected end of data in block '" + block_ + "' at byte " + std::to_string(pos_));
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string module_;
  std::string block_ = "header";
};

inline Bytes read_file_bytes(const std::string& path, std::string_view module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, module, "missing-file", "cannot open file: " + path);
  in.seekg(0, std::ios::end);
  const auto n = in.tellg();
  in.seekg(0);
  Bytes buf(static_cast<std::size_t>(n));
  if (n > 0) in.read(reinterpret_cast<char*>(buf.data()), n);
  if (!in) fail(Errc::io, module, "read-failed", "failed reading file: " + path);
  return buf;
}

inline void write_file_bytes(const std::string& path, const Bytes& bytes, std::string_view module) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, module, "write-failed", "cannot create file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io, module, "write-failed", "failed writing file: " + path);
}

}  // namespace bpgan
