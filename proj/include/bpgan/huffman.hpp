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
#include <cstdint>
#include <queue>
#include <vector>

#include "bpgan/bitio.hpp"
#include "bpgan/bytes.hpp"

namespace bpgan {

// Canonical Huffman coding of quantization indices. Only the code lengths
// travel in the bitstream; both sides rebuild identical codes by assigning
// them in (length, symbol) order. Tie-breaking during tree construction is
// by (weight, first-creation order), which makes the table a pure function
// of the frequency vector.

struct HuffmanTable {
  std::vector<std::uint8_t> lengths;  // per symbol; 0 = absent
  std::vector<std::uint64_t> codes;   // canonical, derived from lengths

  std::size_t alphabet() const { return lengths.size(); }
};

/// Kraft sum over present symbols.
inline double kraft_sum(const std::vector<std::uint8_t>& lengths) {
  double s = 0.0;
  for (std::uint8_t len : lengths)
    if (len > 0) s += std::ldexp(1.0, -static_cast<int>(len));
  return s;
}

/// Assigns canonical codes in (length, symbol index) order.
inline std::vector<std::uint64_t> codes_from_lengths(const std::vector<std::uint8_t>& lengths) {
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < lengths.size(); ++s)
    if (lengths[s] > 0) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lengths[a] != lengths[b] ? lengths[a] < lengths[b] : a < b;
  });
  std::vector<std::uint64_t> codes(lengths.size(), 0);
  std::uint64_t code = 0;
  unsigned prev_len = 0;
  for (std::size_t s : order) {
    code <<= (lengths[s] - prev_len);
    codes[s] = code;
    prev_len = lengths[s];
    ++code;
  }
  return codes;
}

/// Optimal prefix code lengths for the given counts (zero-count symbols get
/// no code). A single-symbol alphabet still gets one bit so its stream has a
/// defined width.
inline HuffmanTable build_table(const std::vector<std::uint64_t>& counts) {
  if (counts.empty() || counts.size() > 65536)
    fail(Errc::io, "entropy", "bad-alphabet",
         "alphabet size must be 1..65536, got " + std::to_string(counts.size()));
  std::vector<std::size_t> present;
  for (std::size_t s = 0; s < counts.size(); ++s)
    if (counts[s] > 0) present.push_back(s);
  if (present.empty())
    fail(Errc::io, "entropy", "empty-frequencies", "all symbol counts are zero");

  HuffmanTable table;
  table.lengths.assign(counts.size(), 0);
  if (present.size() == 1) {
    table.lengths[present[0]] = 1;
    table.codes = codes_from_lengths(table.lengths);
    return table;
  }

  // Huffman tree over (weight, creation order) keys; leaves are created
  // first in symbol order, so ties resolve by (count, symbol index).
  struct Node {
    std::uint64_t weight;
    std::uint64_t order;
    int left, right;  // -1 for leaves
    std::size_t symbol;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * present.size());
  using Key = std::pair<std::uint64_t, std::uint64_t>;  // (weight, order)
  std::priority_queue<std::pair<Key, int>, std::vector<std::pair<Key, int>>, std::greater<>> pq;
  std::uint64_t order = 0;
  for (std::size_t s : present) {
    nodes.push_back({counts[s], order, -1, -1, s});
    pq.push({{counts[s], order}, static_cast<int>(nodes.size() - 1)});
    ++order;
  }
  while (pq.size() > 1) {
    const auto [ka, a] = pq.top();
    pq.pop();
    const auto [kb, b] = pq.top();
    pq.pop();
    nodes.push_back({ka.first + kb.first, order, a, b, 0});
    pq.push({{ka.first + kb.first, order}, static_cast<int>(nodes.size() - 1)});
    ++order;
  }

  // Depth-first depth assignment from the root.
  std::vector<std::pair<int, unsigned>> stack{{pq.top().second, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& node = nodes[static_cast<std::size_t>(idx)];
    if (node.left < 0) {
      if (depth > 63)
        fail(Errc::internal, "entropy", "code-overflow", "Huffman code length exceeds 63 bits");
      table.lengths[node.symbol] = static_cast<std::uint8_t>(depth);
      continue;
    }
    stack.push_back({node.left, depth + 1});
    stack.push_back({node.right, depth + 1});
  }
  table.codes = codes_from_lengths(table.lengths);
  return table;
}

/// Fixed-width fallback: every symbol gets ceil(log2 k) bits. The result is
/// still a valid canonical table, so raw (entropy-coding-off) payloads ride
/// the same encode/decode path.
inline HuffmanTable uniform_table(std::size_t k) {
  if (k < 1 || k > 65536)
    fail(Errc::format, "entropy", "bad-alphabet",
         "alphabet size must be in [1, 65536], got " + std::to_string(k));
  std::uint8_t bits = 1;
  while ((std::size_t{1} << bits) < k) ++bits;
  HuffmanTable table;
  table.lengths.assign(k, bits);
  table.codes = codes_from_lengths(table.lengths);
  return table;
}

/// Expected code length in bits per symbol under the count distribution.
inline double expected_length(const HuffmanTable& table, const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0, bits = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    total += counts[s];
    bits += counts[s] * table.lengths[s];
  }
  return total == 0 ? 0.0 : static_cast<double>(bits) / static_cast<double>(total);
}

inline void huffman_encode(const HuffmanTable& table, const std::vector<std::uint32_t>& symbols,
                           BitWriter& out) {
  for (std::uint32_t s : symbols) {
    if (s >= table.alphabet() || table.lengths[s] == 0)
      fail(Errc::format, "entropy", "absent-symbol",
           "symbol " + std::to_string(s) + " has no code");
    out.bits(table.codes[s], table.lengths[s]);
  }
}

inline std::vector<std::uint32_t> huffman_decode(const HuffmanTable& table, BitReader& in,
                                                 std::size_t n) {
  // Canonical decode bookkeeping: for each length, the first code value and
  // the symbols of that length in canonical order.
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < table.alphabet(); ++s)
    if (table.lengths[s] > 0) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.lengths[a] != table.lengths[b] ? table.lengths[a] < table.lengths[b] : a < b;
  });
  std::vector<std::uint64_t> first_code(65, 0), count_at(65, 0), first_pos(65, 0);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const unsigned len = table.lengths[order[p]];
    if (count_at[len] == 0) {
      first_code[len] = table.codes[order[p]];
      first_pos[len] = p;
    }
    ++count_at[len];
  }

  std::vector<std::uint32_t> symbols;
  symbols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t code = 0;
    unsigned len = 0;
    for (;;) {
      code = (code << 1) | static_cast<std::uint64_t>(in.bit());
      ++len;
      if (len > 63)
        fail(Errc::format, "entropy", "bad-code", "no codeword matches the bit pattern");
      if (count_at[len] > 0 && code >= first_code[len] &&
          code - first_code[len] < count_at[len]) {
        symbols.push_back(
            static_cast<std::uint32_t>(order[first_pos[len] + (code - first_code[len])]));
        break;
      }
    }
  }
  return symbols;
}

// Serialized table block: alphabet size K as u16 (matching the codebook
// level count), then K code lengths as u8.

inline void write_table_block(ByteWriter& w, const HuffmanTable& table) {
  if (table.alphabet() > 65535)
    fail(Errc::format, "entropy", "bad-alphabet", "table block holds at most 65535 symbols");
  w.u16(static_cast<std::uint16_t>(table.alphabet()));
  for (std::uint8_t len : table.lengths) w.u8(len);
}

inline HuffmanTable read_table_block(ByteReader& r) {
  r.set_block("huffman-table");
  const std::size_t k = r.u16();
  if (k == 0)
    fail(Errc::format, "entropy", "bad-alphabet", "table block declares zero symbols");
  HuffmanTable table;
  table.lengths.resize(k);
  bool any = false;
  for (std::size_t s = 0; s < k; ++s) {
    table.lengths[s] = r.u8();
    if (table.lengths[s] > 63)
      fail(Errc::format, "entropy", "bad-code-length",
           "code length " + std::to_string(table.lengths[s]) + " exceeds 63");
    any = any || table.lengths[s] > 0;
  }
  if (!any)
    fail(Errc::format, "entropy", "empty-frequencies", "table block has no present symbols");
  if (kraft_sum(table.lengths) > 1.0 + 1e-12)
    fail(Errc::format, "entropy", "kraft-violation",
         "code lengths violate the Kraft inequality");
  table.codes = codes_from_lengths(table.lengths);
  return table;
}

}  // namespace bpgan
