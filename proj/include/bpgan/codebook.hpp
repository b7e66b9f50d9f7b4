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
#include <cmath>
#include <cstdint>
#include <vector>

#include "bpgan/bytes.hpp"
#include "bpgan/tensor.hpp"

namespace bpgan {

// Non-uniform scalar quantization. One shared codebook quantizes every
// latent dimension; the centers come from 1-D K-means (Lloyd) over an
// unquantized latent corpus and are frozen afterwards. Centers are rounded
// to f32 at fit time so the in-memory codebook matches its serialized form
// exactly on both ends of the channel.

struct Codebook {
  std::vector<double> centers;  // strictly increasing

  std::size_t levels() const { return centers.size(); }
};

inline void validate_codebook(const Codebook& cb) {
  if (cb.centers.size() < 2 || cb.centers.size() > 65536)
    fail(Errc::format, "quantization", "bad-level-count",
         "codebook needs 2..65536 centers, got " + std::to_string(cb.centers.size()));
  for (std::size_t i = 0; i < cb.centers.size(); ++i) {
    if (!std::isfinite(cb.centers[i]))
      fail(Errc::numeric, "quantization", "bad-center", "codebook center is not finite");
    if (i > 0 && !(cb.centers[i] - cb.centers[i - 1] > 1e-9))
      fail(Errc::format, "quantization", "bad-center",
           "codebook centers must increase by more than 1e-9");
  }
}

struct KmeansTrace {
  std::vector<double> distortion;  // mean squared distance, one entry per iteration
  double final_distortion = 0.0;   // under the f32-rounded shipped centers
  std::vector<std::size_t> occupancy;  // final per-center sample counts
};

/// Lloyd's algorithm on scalars. Initial centers are K evenly spaced
/// quantiles of the distinct sample values, which makes the fit a pure
/// function of its inputs; the seed parameter is accepted for interface
/// stability but never consulted. Empty clusters are re-seeded to the sample
/// farthest from its current center. Terminates at an assignment fixpoint or
/// after max_iters.
inline Codebook fit_codebook(const std::vector<double>& samples, std::size_t k,
                             std::size_t max_iters, std::uint64_t /*seed*/ = 0,
                             KmeansTrace* trace = nullptr) {
  if (k < 2 || k > 65536)
    fail(Errc::io, "quantization", "bad-level-count",
         "level count must be in 2..65536, got " + std::to_string(k));
  for (double v : samples)
    if (!std::isfinite(v))
      fail(Errc::numeric, "quantization", "bad-sample", "corpus contains a non-finite value");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < k)
    fail(Errc::io, "quantization", "too-few-samples",
         "need at least " + std::to_string(k) + " distinct samples, got " +
             std::to_string(distinct.size()));

  std::vector<double> centers(k);
  if (distinct.size() == k) {
    centers = distinct;  // already the optimum: zero distortion
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t q = (2 * i + 1) * distinct.size() / (2 * k);
      centers[i] = distinct[q];
    }
  }

  const std::size_t n = sorted.size();
  std::vector<std::size_t> assign(n), prev_assign;
  std::vector<double> sums(k);
  std::vector<std::size_t> counts(k);
  double last_distortion = -1.0;
  for (std::size_t iter = 0; distinct.size() > k && iter < max_iters; ++iter) {
    // Assignment over sorted samples: the best center index is monotone.
    double distortion = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (c + 1 < k &&
             std::abs(sorted[i] - centers[c + 1]) < std::abs(sorted[i] - centers[c]))
        ++c;
      assign[i] = c;
      const double d = sorted[i] - centers[c];
      distortion += d * d;
    }
    distortion /= static_cast<double>(n);
    if (last_distortion >= 0.0 && distortion > last_distortion * (1.0 + 1e-9) + 1e-15)
      fail(Errc::internal, "quantization", "distortion-increase",
           "k-means distortion increased between iterations");
    last_distortion = distortion;
    if (trace != nullptr) trace->distortion.push_back(distortion);
    if (assign == prev_assign) break;
    prev_assign = assign;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[assign[i]] += sorted[i];
      counts[assign[i]] += 1;
    }
    for (std::size_t j = 0; j < k; ++j)
      if (counts[j] > 0) centers[j] = sums[j] / static_cast<double>(counts[j]);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      // Re-seed an empty cluster to the sample farthest from its center.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(sorted[i] - centers[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[j] = sorted[far];
    }
    std::sort(centers.begin(), centers.end());
  }

  Codebook cb;
  cb.centers.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    cb.centers[j] = static_cast<double>(static_cast<float>(centers[j]));
  validate_codebook(cb);
  if (trace != nullptr) {
    trace->occupancy.assign(k, 0);
    double distortion = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (c + 1 < k &&
             std::abs(sorted[i] - cb.centers[c + 1]) < std::abs(sorted[i] - cb.centers[c]))
        ++c;
      trace->occupancy[c] += 1;
      const double d = sorted[i] - cb.centers[c];
      distortion += d * d;
    }
    trace->final_distortion = distortion / static_cast<double>(n);
  }
  return cb;
}

/// Index of the nearest center; exact midpoints resolve to the smaller one.
inline std::size_t nearest_index(const Codebook& cb, double v) {
  if (!std::isfinite(v))
    fail(Errc::numeric, "quantization", "bad-value", "cannot project a non-finite value");
  const auto& c = cb.centers;
  const auto it = std::lower_bound(c.begin(), c.end(), v);
  if (it == c.begin()) return 0;
  if (it == c.end()) return c.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - c.begin());
  const std::size_t lo = hi - 1;
  return (v - c[lo] <= c[hi] - v) ? lo : hi;
}

inline double project_value(const Codebook& cb, double v) {
  return cb.centers[nearest_index(cb, v)];
}

/// Element-wise nearest-center projection Q(z). Idempotent.
inline Tensor project(const Codebook& cb, const Tensor& z) {
  Tensor out = z;
  for (double& v : out.data) v = project_value(cb, v);
  return out;
}

/// Maps an already-quantized vector to center indices. Every element must
/// sit on a center (within 1e-9).
inline std::vector<std::uint32_t> symbol_indices(const Codebook& cb, const Tensor& zq) {
  std::vector<std::uint32_t> idx(zq.numel());
  for (std::size_t i = 0; i < zq.numel(); ++i) {
    const std::size_t j = nearest_index(cb, zq.data[i]);
    if (std::abs(zq.data[i] - cb.centers[j]) > 1e-9)
      fail(Errc::format, "quantization", "not-a-center",
           "element " + std::to_string(i) + " is not a codebook center");
    idx[i] = static_cast<std::uint32_t>(j);
  }
  return idx;
}

inline Tensor values_from_indices(const Codebook& cb, const std::vector<std::uint32_t>& idx) {
  Tensor z({idx.size()});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= cb.levels())
      fail(Errc::format, "quantization", "bad-symbol",
           "symbol " + std::to_string(idx[i]) + " outside codebook of " +
               std::to_string(cb.levels()) + " levels");
    z.data[i] = cb.centers[idx[i]];
  }
  return z;
}

// Serialized block: K as u16, then K f32 centers in increasing order. The
// same block is embedded in compressed containers and stored standalone as a
// .bpcb file.

inline void write_codebook_block(ByteWriter& w, const Codebook& cb) {
  validate_codebook(cb);
  if (cb.levels() > 65535)
    fail(Errc::format, "quantization", "bad-level-count",
         "codebook block holds at most 65535 centers");
  w.u16(static_cast<std::uint16_t>(cb.levels()));
  for (double c : cb.centers) w.f32(static_cast<float>(c));
}

inline Codebook read_codebook_block(ByteReader& r) {
  r.set_block("codebook");
  const std::size_t k = r.u16();
  if (k < 2)
    fail(Errc::format, "quantization", "bad-level-count",
         "codebook block declares " + std::to_string(k) + " centers");
  Codebook cb;
  cb.centers.resize(k);
  for (std::size_t i = 0; i < k; ++i) cb.centers[i] = static_cast<double>(r.f32());
  validate_codebook(cb);
  return cb;
}

inline void save_codebook_file(const Codebook& cb, const std::string& path) {
  ByteWriter w;
  write_codebook_block(w, cb);
  write_file_bytes(path, w.bytes(), "quantization");
}

inline Codebook load_codebook_file(const std::string& path) {
  const Bytes bytes = read_file_bytes(path, "quantization");
  ByteReader r(bytes, "quantization");
  Codebook cb = read_codebook_block(r);
  if (r.remaining() != 0)
    fail(Errc::format, "quantization", "trailing-bytes", "unexpected bytes after codebook");
  return cb;
}

}  // namespace bpgan
