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
#include <vector>

#include "bpgan/autodiff.hpp"
#include "bpgan/codebook.hpp"
#include "bpgan/objectives.hpp"
#include "bpgan/rng.hpp"

namespace bpgan {

// Quantized latent search: minimize F(x, G(z)) subject to every element of
// z lying in the codebook. Three strategies:
//
//   direct  keep the iterate quantized: evaluate F and its gradient at the
//           projected point, take an optimizer step, re-project.
//   admm    split the constraint: z-steps descend F + (mu/2)||z - u + eta||^2,
//           u is the analytic projection Q(z + eta), eta is the scaled dual;
//           the final answer projects z onto the codebook.
//   iht     progressive freezing: after each block of gradient iterations,
//           pin the unfrozen coordinates closest to a center at that center
//           until every coordinate is pinned.
//
// Randomness is confined to seeded initialization; everything afterwards is
// deterministic.

enum class SearchMethod : std::uint8_t { direct = 1, admm = 2, iht = 3 };

enum class OptimizerKind : std::uint8_t { sgd = 1, adam = 2 };

struct SearchConfig {
  SearchMethod method = SearchMethod::admm;
  std::size_t max_iters = 500;
  double step = 0.01;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double mu = 0.01;              // ADMM penalty
  std::size_t inner_steps = 1;   // ADMM z-step gradient iterations
  double convergence_tol = 1e-6;
  std::vector<std::size_t> iht_quota;  // M_i, summing to the latent dimension
  std::vector<std::size_t> iht_inner;  // n_i, same length as iht_quota
  std::uint64_t seed = 0;
};

struct SearchReport {
  std::vector<double> objective_history;   // F per iteration
  std::vector<double> lagrangian_history;  // ADMM: augmented Lagrangian per iteration
  std::vector<Tensor> substep_latents;     // IHT: latent after each sub-step's freeze
  std::size_t iterations = 0;
  double final_objective = 0.0;            // F at the returned quantized latent
};

/// Scaled dual ascent, eta += z - u (one step per outer ADMM iteration).
inline void admm_dual_update(Tensor& eta, const Tensor& z, const Tensor& u) {
  for (std::size_t i = 0; i < eta.numel(); ++i) eta.data[i] += z.data[i] - u.data[i];
}

/// Encoder warm start E(x) when an encoder is available, otherwise a seeded
/// standard-normal draw.
inline Tensor initialize(const Tensor& x, const Model* encoder, std::size_t dim,
                         std::uint64_t seed) {
  if (encoder != nullptr) {
    auto [z0, tape] = forward(*encoder, x);
    (void)tape;
    if (z0.numel() != dim)
      fail(Errc::format, "latent-search", "dim-mismatch",
           "encoder produces " + std::to_string(z0.numel()) + " values, expected " +
               std::to_string(dim));
    return z0.reshaped({dim});
  }
  Rng rng(seed);
  Tensor z({dim});
  for (double& v : z.data) v = rng.normal();
  return z;
}

/// First-order optimizer over the latent vector. Frozen coordinates (IHT)
/// are skipped entirely: neither the value nor the moments move.
class Optimizer {
 public:
  Optimizer(const SearchConfig& cfg, std::size_t dim)
      : cfg_(cfg), m_(dim, 0.0), v_(dim, 0.0) {}

  void step(Tensor& z, const Tensor& grad, const std::vector<bool>* frozen = nullptr) {
    if (!grad.all_finite())
      fail(Errc::numeric, "latent-search", "nan-gradient",
           "objective gradient contains a non-finite value");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < z.numel(); ++i) {
      if (frozen != nullptr && (*frozen)[i]) continue;
      if (cfg_.optimizer == OptimizerKind::sgd) {
        z.data[i] -= cfg_.step * grad.data[i];
        continue;
      }
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad.data[i];
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad.data[i] * grad.data[i];
      const double mh = m_[i] / bc1;
      const double vh = v_[i] / bc2;
      z.data[i] -= cfg_.step * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }

 private:
  SearchConfig cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

namespace detail {

inline void check_finite_objective(double f) {
  if (!std::isfinite(f))
    fail(Errc::numeric, "latent-search", "nan-objective", "objective value is not finite");
}

}  // namespace detail

/// Direct method: the iterate is quantized at every step.
inline std::pair<Tensor, SearchReport> search_direct(const Tensor& z0, const Codebook& cb,
                                                     const Objective& objective,
                                                     const SearchConfig& cfg) {
  validate_codebook(cb);
  Tensor z = project(cb, z0);
  SearchReport report;
  Optimizer opt(cfg, z.numel());
  Tensor grad;
  double prev_f = 0.0;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const double f = objective.value_and_grad(z, grad);
    detail::check_finite_objective(f);
    report.objective_history.push_back(f);
    report.iterations = k + 1;
    opt.step(z, grad);
    z = project(cb, z);
    if (k > 0 && std::abs(f - prev_f) <= cfg.convergence_tol) break;
    prev_f = f;
  }
  report.final_objective = objective.value(z);
  return {std::move(z), std::move(report)};
}

/// ADMM splitting with an inexact z-step (`inner_steps` gradient iterations
/// on the augmented term), the analytic u-step u = Q(z + eta), dual ascent
/// eta += z - u, and a final projection of z onto the codebook.
inline std::pair<Tensor, SearchReport> search_admm(const Tensor& z0, const Codebook& cb,
                                                   const Objective& objective,
                                                   const SearchConfig& cfg) {
  validate_codebook(cb);
  if (!(cfg.mu > 0.0))
    fail(Errc::io, "latent-search", "bad-config", "ADMM penalty mu must be positive");
  if (cfg.inner_steps == 0)
    fail(Errc::io, "latent-search", "bad-config", "ADMM needs at least one inner gradient step");
  Tensor z = z0;
  Tensor u = project(cb, z);
  Tensor eta = Tensor::zeros(z.shape);
  SearchReport report;
  Optimizer opt(cfg, z.numel());
  Tensor grad;
  double prev_f = 0.0;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    double f = 0.0;
    for (std::size_t s = 0; s < cfg.inner_steps; ++s) {
      f = objective.value_and_grad(z, grad);
      detail::check_finite_objective(f);
      for (std::size_t i = 0; i < z.numel(); ++i)
        grad.data[i] += cfg.mu * (z.data[i] - u.data[i] + eta.data[i]);
      opt.step(z, grad);
    }
    for (std::size_t i = 0; i < z.numel(); ++i) u.data[i] = z.data[i] + eta.data[i];
    u = project(cb, u);
    admm_dual_update(eta, z, u);

    f = objective.value(z);
    detail::check_finite_objective(f);
    report.objective_history.push_back(f);
    double penalty = 0.0;
    for (std::size_t i = 0; i < z.numel(); ++i) {
      const double d = z.data[i] - u.data[i] + eta.data[i];
      penalty += d * d;
    }
    report.lagrangian_history.push_back(f + 0.5 * cfg.mu * penalty);
    report.iterations = k + 1;
    if (k > 0 && std::abs(f - prev_f) <= cfg.convergence_tol) break;
    prev_f = f;
  }
  Tensor zq = project(cb, z);
  report.final_objective = objective.value(zq);
  return {std::move(zq), std::move(report)};
}

/// IHT / hard-thresholding pursuit schedule: sub-step i runs n_i masked
/// gradient iterations, then freezes the M_i unfrozen coordinates with the
/// least |z - Q(z)| at their quantized values.
inline std::pair<Tensor, SearchReport> search_iht(const Tensor& z0, const Codebook& cb,
                                                  const Objective& objective,
                                                  const SearchConfig& cfg) {
  validate_codebook(cb);
  const std::size_t dim = z0.numel();
  if (cfg.iht_quota.empty() || cfg.iht_quota.size() != cfg.iht_inner.size())
    fail(Errc::io, "latent-search", "bad-config",
         "IHT quota and inner-iteration lists must be non-empty and equally long");
  std::size_t quota_sum = 0;
  for (std::size_t m : cfg.iht_quota) {
    if (m == 0) fail(Errc::io, "latent-search", "bad-config", "IHT quota entries must be positive");
    quota_sum += m;
  }
  if (quota_sum != dim)
    fail(Errc::io, "latent-search", "bad-config",
         "IHT quotas sum to " + std::to_string(quota_sum) + ", latent dimension is " +
             std::to_string(dim));

  Tensor z = z0;
  std::vector<bool> frozen(dim, false);
  SearchReport report;
  Optimizer opt(cfg, dim);
  Tensor grad;
  for (std::size_t sub = 0; sub < cfg.iht_quota.size(); ++sub) {
    for (std::size_t it = 0; it < cfg.iht_inner[sub]; ++it) {
      const double f = objective.value_and_grad(z, grad);
      detail::check_finite_objective(f);
      report.objective_history.push_back(f);
      report.iterations += 1;
      opt.step(z, grad, &frozen);
    }
    // Freeze the M_i unfrozen coordinates nearest to a center.
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < dim; ++i)
      if (!frozen[i]) dist.emplace_back(std::abs(z.data[i] - project_value(cb, z.data[i])), i);
    std::sort(dist.begin(), dist.end());
    const std::size_t take = std::min(cfg.iht_quota[sub], dist.size());
    for (std::size_t j = 0; j < take; ++j) {
      const std::size_t i = dist[j].second;
      z.data[i] = project_value(cb, z.data[i]);
      frozen[i] = true;
    }
    report.substep_latents.push_back(z);
  }
  report.final_objective = objective.value(z);
  return {std::move(z), std::move(report)};
}

/// Dispatch on cfg.method.
inline std::pair<Tensor, SearchReport> run_search(const Tensor& z0, const Codebook& cb,
                                                  const Objective& objective,
                                                  const SearchConfig& cfg) {
  switch (cfg.method) {
    case SearchMethod::direct: return search_direct(z0, cb, objective, cfg);
    case SearchMethod::admm: return search_admm(z0, cb, objective, cfg);
    case SearchMethod::iht: return search_iht(z0, cb, objective, cfg);
  }
  fail(Errc::internal, "latent-search", "bad-method", "unknown search method");
}

}  // namespace bpgan
