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
using bpgan_test::random_tensor;

namespace {

Codebook grid_codebook(double lo, double hi, std::size_t levels) {
  Codebook cb;
  const double step = (hi - lo) / static_cast<double>(levels - 1);
  for (std::size_t i = 0; i < levels; ++i)
    cb.centers.push_back(static_cast<double>(static_cast<float>(lo + step * i)));
  return cb;
}

Objective zero_objective() {
  Objective o;
  o.value = [](const Tensor&) { return 0.0; };
  o.value_and_grad = [](const Tensor& z, Tensor& grad) {
    grad = Tensor::zeros(z.shape);
    return 0.0;
  };
  return o;
}

/// F over every center combination of a 2-D latent; returns the minimum.
double exhaustive_min(const Objective& obj, const Codebook& cb) {
  double best = std::numeric_limits<double>::infinity();
  for (double a : cb.centers)
    for (double b : cb.centers) best = std::min(best, obj.value(Tensor::flat({a, b})));
  return best;
}

}  // namespace

TEST_CASE("optimizer single-step oracles") {
  SearchConfig cfg;
  cfg.step = 0.1;
  SECTION("sgd") {
    cfg.optimizer = OptimizerKind::sgd;
    Optimizer opt(cfg, 1);
    Tensor z = Tensor::flat({1.0});
    opt.step(z, Tensor::flat({2.0}));
    CHECK(z.data[0] == 0.8);
  }
  SECTION("adam's first step is a unit step scaled by the rate") {
    cfg.optimizer = OptimizerKind::adam;
    cfg.step = 0.01;
    Optimizer opt(cfg, 1);
    Tensor z = Tensor::flat({1.0});
    opt.step(z, Tensor::flat({2.0}));
    // Bias correction makes m-hat = g and v-hat = g^2, so the move is
    // -step * g / (|g| + eps).
    CHECK(z.data[0] == Catch::Approx(0.99).margin(1e-9));
  }
  SECTION("zero gradient is a fixed point") {
    for (OptimizerKind kind : {OptimizerKind::sgd, OptimizerKind::adam}) {
      cfg.optimizer = kind;
      Optimizer opt(cfg, 3);
      Tensor z = Tensor::flat({1, -2, 3});
      opt.step(z, Tensor::zeros({3}));
      CHECK(z.data == std::vector<double>{1, -2, 3});
    }
  }
  SECTION("frozen coordinates never move") {
    cfg.optimizer = OptimizerKind::adam;
    Optimizer opt(cfg, 2);
    Tensor z = Tensor::flat({1.0, 1.0});
    const std::vector<bool> frozen{true, false};
    opt.step(z, Tensor::flat({5.0, 5.0}), &frozen);
    opt.step(z, Tensor::flat({5.0, 5.0}), &frozen);
    CHECK(z.data[0] == 1.0);
    CHECK(z.data[1] < 1.0);
  }
  SECTION("non-finite gradients are rejected") {
    Optimizer opt(cfg, 1);
    Tensor z = Tensor::flat({0.0});
    const Error e = expect_error([&] { opt.step(z, Tensor::flat({std::nan("")})); });
    CHECK(e.reason() == "nan-gradient");
    CHECK(e.code() == Errc::numeric);
  }
}

TEST_CASE("latent initialization") {
  SECTION("encoder warm start equals E(x)") {
    SyntheticModelSpec spec;
    spec.kind = SyntheticKind::orthonormal_linear;
    spec.latent_dim = 6;
    spec.signal_shape = {20};
    spec.seed = 3;
    const Model enc = make_oracle_encoder(spec);
    const Tensor x = random_tensor({20}, 4);
    const Tensor z0 = initialize(x, &enc, 6, 999);
    CHECK(z0.shape == Shape{6});
    CHECK(z0.data == forward(enc, x).first.data);
  }
  SECTION("seeded draws are deterministic") {
    const Tensor x = Tensor::zeros({4});
    const Tensor a = initialize(x, nullptr, 8, 42);
    const Tensor b = initialize(x, nullptr, 8, 42);
    const Tensor c = initialize(x, nullptr, 8, 43);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    CHECK(a.numel() == 8);
  }
  SECTION("encoder dimension mismatch") {
    SyntheticModelSpec spec;
    spec.kind = SyntheticKind::orthonormal_linear;
    spec.latent_dim = 6;
    spec.signal_shape = {20};
    const Model enc = make_oracle_encoder(spec);
    const Tensor x = random_tensor({20}, 5);
    CHECK(expect_error([&] { (void)initialize(x, &enc, 7, 0); }).reason() == "dim-mismatch");
  }
}

TEST_CASE("direct search") {
  SyntheticModelSpec spec;
  spec.kind = SyntheticKind::orthonormal_linear;
  spec.latent_dim = 8;
  spec.signal_shape = {32};
  spec.seed = 11;
  const Model g = make_synthetic(spec);
  const Model enc = make_oracle_encoder(spec);
  const Codebook cb = grid_codebook(-3.0, 3.0, 601);

  const Tensor x = forward(g, random_tensor({8}, 12)).first;
  const Objective obj = make_mse_objective(x, g);
  const Tensor zstar = initialize(x, &enc, 8, 0);

  SECTION("zero iterations return the projected start") {
    SearchConfig cfg;
    cfg.method = SearchMethod::direct;
    cfg.max_iters = 0;
    auto [z, report] = search_direct(zstar, cb, obj, cfg);
    CHECK(z.data == project(cb, zstar).data);
    CHECK(report.iterations == 0);
    CHECK(report.objective_history.empty());
    CHECK(report.final_objective == Catch::Approx(obj.value(z)));
  }
  SECTION("a dense codebook pins the quantized optimum") {
    // With an orthonormal generator the objective separates per coordinate,
    // so the per-coordinate nearest center of z* is the best quantized point.
    SearchConfig cfg;
    cfg.method = SearchMethod::direct;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.step = 0.1;
    cfg.max_iters = 60;
    cfg.convergence_tol = -1.0;  // negative: never stop early
    auto [z, report] = search_direct(zstar, cb, obj, cfg);
    CHECK(report.iterations == 60);
    CHECK(z.data == project(cb, zstar).data);
    CHECK(report.final_objective <= obj.value(project(cb, zstar)) + 1e-12);
    // The history never dips below the best quantized objective.
    for (double f : report.objective_history)
      CHECK(f >= report.final_objective - 1e-12);
  }
}

TEST_CASE("admm search") {
  SECTION("dual update arithmetic") {
    Tensor eta = Tensor::flat({0.1});
    admm_dual_update(eta, Tensor::flat({0.6}), Tensor::flat({0.5}));
    CHECK(eta.data[0] == Catch::Approx(0.2).margin(1e-15));
  }
  SECTION("config validation") {
    const Codebook cb = grid_codebook(-1.0, 1.0, 3);
    const Objective obj = zero_objective();
    SearchConfig cfg;
    cfg.mu = 0.0;
    CHECK(expect_error([&] { (void)search_admm(Tensor::zeros({2}), cb, obj, cfg); }).reason() ==
          "bad-config");
    cfg.mu = 0.1;
    cfg.inner_steps = 0;
    CHECK(expect_error([&] { (void)search_admm(Tensor::zeros({2}), cb, obj, cfg); }).reason() ==
          "bad-config");
  }
  SECTION("with no data term the iterate settles on a center") {
    const Codebook cb = grid_codebook(-1.0, 1.0, 5);
    SearchConfig cfg;
    cfg.method = SearchMethod::admm;
    cfg.optimizer = OptimizerKind::sgd;
    // step * mu = 1: the single SGD step minimizes the quadratic z-subproblem
    // exactly, so the splitting collapses onto a center and the dual dies.
    cfg.step = 1.0;
    cfg.mu = 1.0;
    cfg.max_iters = 200;
    cfg.convergence_tol = -1.0;
    auto [z, report] = search_admm(Tensor::flat({0.33, -0.8}), cb, zero_objective(), cfg);
    for (double v : z.data) CHECK(project_value(cb, v) == v);
    CHECK(report.final_objective == 0.0);
    // The augmented Lagrangian is pure penalty here and must die out.
    CHECK(report.lagrangian_history.back() < 1e-8);
  }
  SECTION("matches the exhaustive quantized optimum on small problems") {
    const Codebook cb = grid_codebook(-1.0, 1.0, 3);  // centers -1, 0, 1
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SyntheticModelSpec spec;
      spec.kind = SyntheticKind::orthonormal_linear;
      spec.latent_dim = 2;
      spec.signal_shape = {4};
      spec.seed = 100 + seed;
      const Model g = make_synthetic(spec);
      const Tensor x = forward(g, random_tensor({2}, 200 + seed)).first;
      const Objective obj = make_mse_objective(x, g);

      SearchConfig cfg;
      cfg.method = SearchMethod::admm;
      cfg.optimizer = OptimizerKind::sgd;
      cfg.step = 0.05;
      cfg.mu = 1e-4;
      cfg.max_iters = 400;
      cfg.convergence_tol = -1.0;
      auto [z, report] = search_admm(random_tensor({2}, 300 + seed), cb, obj, cfg);
      if (report.final_objective <= exhaustive_min(obj, cb) + 1e-9) ++hits;
    }
    // A tiny penalty keeps the relaxed iterate at the unconstrained optimum,
    // whose projection is the exhaustive winner away from cell boundaries.
    CHECK(hits >= 18);
  }
}

TEST_CASE("iht search") {
  const Codebook cb = grid_codebook(0.0, 1.0, 2);  // centers 0, 1

  SECTION("quota validation") {
    const Objective obj = zero_objective();
    SearchConfig cfg;
    cfg.iht_quota = {};
    cfg.iht_inner = {};
    CHECK(expect_error([&] { (void)search_iht(Tensor::zeros({3}), cb, obj, cfg); }).reason() ==
          "bad-config");
    cfg.iht_quota = {2, 2};
    cfg.iht_inner = {1};
    CHECK(expect_error([&] { (void)search_iht(Tensor::zeros({3}), cb, obj, cfg); }).reason() ==
          "bad-config");
    cfg.iht_quota = {2, 2};
    cfg.iht_inner = {1, 1};
    CHECK(expect_error([&] { (void)search_iht(Tensor::zeros({3}), cb, obj, cfg); }).reason() ==
          "bad-config");
    cfg.iht_quota = {2, 0};
    cfg.iht_inner = {1, 1};
    CHECK(expect_error([&] { (void)search_iht(Tensor::zeros({2}), cb, obj, cfg); }).reason() ==
          "bad-config");
  }
  SECTION("freeze order is nearest-center first, ties to the lower index") {
    SearchConfig cfg;
    cfg.method = SearchMethod::iht;
    cfg.iht_quota = {1, 1, 1};
    cfg.iht_inner = {0, 0, 0};  // no gradient motion: freezing order is pure
    auto [z, report] = search_iht(Tensor::flat({0.3, 0.3, 0.1}), cb, zero_objective(), cfg);
    REQUIRE(report.substep_latents.size() == 3);
    CHECK(report.substep_latents[0].data == std::vector<double>{0.3, 0.3, 0});
    CHECK(report.substep_latents[1].data == std::vector<double>{0, 0.3, 0});
    CHECK(report.substep_latents[2].data == std::vector<double>{0, 0, 0});
    CHECK(z.data == std::vector<double>{0, 0, 0});
  }
  SECTION("frozen coordinates survive later sub-steps untouched") {
    SyntheticModelSpec spec;
    spec.kind = SyntheticKind::orthonormal_linear;
    spec.latent_dim = 4;
    spec.signal_shape = {12};
    spec.seed = 21;
    const Model g = make_synthetic(spec);
    const Tensor x = forward(g, random_tensor({4}, 22)).first;
    const Objective obj = make_mse_objective(x, g);
    const Codebook wide = grid_codebook(-2.0, 2.0, 9);

    SearchConfig cfg;
    cfg.method = SearchMethod::iht;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.step = 0.05;
    cfg.iht_quota = {2, 2};
    cfg.iht_inner = {3, 2};
    auto [z, report] = search_iht(random_tensor({4}, 23), wide, obj, cfg);

    REQUIRE(report.substep_latents.size() == 2);
    CHECK(report.iterations == 5);
    CHECK(report.objective_history.size() == 5);

    // After the first sub-step exactly two coordinates sit on centers.
    const Tensor& mid = report.substep_latents[0];
    std::vector<std::size_t> frozen_first;
    for (std::size_t i = 0; i < 4; ++i)
      if (mid.data[i] == project_value(wide, mid.data[i])) frozen_first.push_back(i);
    REQUIRE(frozen_first.size() >= 2);  // an unfrozen coord may sit on a center by luck
    // Those values never change again.
    for (std::size_t i : frozen_first) CHECK(z.data[i] == mid.data[i]);
    // The final latent is fully quantized.
    for (double v : z.data) CHECK(project_value(wide, v) == v);
    CHECK(report.final_objective == Catch::Approx(obj.value(z)));
  }
  SECTION("a single sub-step with no iterations is plain projection") {
    SearchConfig cfg;
    cfg.iht_quota = {3};
    cfg.iht_inner = {0};
    const Tensor z0 = Tensor::flat({0.2, 0.7, -1.0});
    auto [z, report] = search_iht(z0, cb, zero_objective(), cfg);
    CHECK(z.data == project(cb, z0).data);
    CHECK(report.iterations == 0);
  }
}

TEST_CASE("run_search dispatches and stays deterministic") {
  SyntheticModelSpec spec;
  spec.kind = SyntheticKind::orthonormal_linear;
  spec.latent_dim = 4;
  spec.signal_shape = {16};
  spec.seed = 31;
  const Model g = make_synthetic(spec);
  const Tensor x = forward(g, random_tensor({4}, 32)).first;
  const Objective obj = make_mse_objective(x, g);
  const Codebook cb = grid_codebook(-2.0, 2.0, 17);
  const Tensor z0 = random_tensor({4}, 33);

  SearchConfig cfg;
  cfg.max_iters = 40;
  for (SearchMethod method : {SearchMethod::direct, SearchMethod::admm, SearchMethod::iht}) {
    cfg.method = method;
    if (method == SearchMethod::iht) {
      cfg.iht_quota = {2, 2};
      cfg.iht_inner = {10, 10};
    }
    auto [z1, r1] = run_search(z0, cb, obj, cfg);
    auto [z2, r2] = run_search(z0, cb, obj, cfg);
    CHECK(z1.data == z2.data);
    CHECK(r1.objective_history == r2.objective_history);
    CHECK(r1.final_objective == r2.final_objective);
    // Every method hands back a fully quantized latent.
    for (double v : z1.data) CHECK(project_value(cb, v) == v);
  }
}

TEST_CASE("searches reject non-finite objectives") {
  Objective bad;
  bad.value = [](const Tensor&) { return std::numeric_limits<double>::infinity(); };
  bad.value_and_grad = [](const Tensor& z, Tensor& grad) {
    grad = Tensor::zeros(z.shape);
    return std::numeric_limits<double>::infinity();
  };
  const Codebook cb = grid_codebook(-1.0, 1.0, 3);
  SearchConfig cfg;
  cfg.method = SearchMethod::direct;
  const Error e =
      expect_error([&] { (void)search_direct(Tensor::zeros({2}), cb, bad, cfg); });
  CHECK(e.reason() == "nan-objective");
}
