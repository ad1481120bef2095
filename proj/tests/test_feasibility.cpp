/******************************************************************************
 * Copyright 2026 The mracsim Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mracsim/feasibility.hpp"
#include "mracsim/numerics.hpp"
#include "test_systems.hpp"

using namespace mracsim;

namespace {

ConstraintSpec benchmark_constraints(double d_bar) {
  ConstraintSpec cs;
  cs.x_bar = 6.5;
  cs.u_bar = 12.0;
  cs.xa_bar = 6.4;
  cs.d_bar = d_bar;
  cs.kx_bar = 1.6;
  cs.kr_bar = 0.6;
  return cs;
}

const double kRbar = std::sqrt(2.0);

}  // namespace

TEST_CASE("compute_eta: arithmetic and linearity") {
  // lambda_min{Q} = 1, lambda_max{P} = 2, ||B|| = 4 -> 1/16.
  const Matrix q = Matrix::identity(3);
  const Matrix p = Matrix::from_rows(
      {{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.5}});
  Matrix b(3, 1);
  b(0, 0) = 4.0;
  CHECK(compute_eta(q, p, b) == doctest::Approx(0.0625).epsilon(1e-12));

  // Doubling Q doubles eta.
  CHECK(compute_eta(q * 2.0, p, b) ==
        doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("compute_eta and alpha/beta on the benchmark") {
  const Matrix q = Matrix::identity(4);
  const Matrix p = solve_lyapunov(test_systems::reference_a(), q);
  const Matrix b = test_systems::plant_b();

  const double eta = compute_eta(q, p, b);
  // Frozen from the oracle solve: 1 / (2 * 18.229148 * 4).
  CHECK(eta == doctest::Approx(0.0068571498758545077).epsilon(1e-9));

  // d_bar = 1.2 run: the published alpha = 1.58 and beta = 1.2 within 0.05.
  const auto [alpha, beta] =
      compute_alpha_beta(benchmark_constraints(1.2), eta, kRbar, 4.0);
  CHECK(alpha == doctest::Approx(1.58).epsilon(0.05 / 1.58));
  CHECK(beta == doctest::Approx(1.2).epsilon(0.05 / 1.2));
  CHECK(alpha == doctest::Approx(1.5931428501241455).epsilon(1e-9));

  // kx_bar = eta -> alpha = 0.
  ConstraintSpec cs0 = benchmark_constraints(1.2);
  cs0.kx_bar = eta;
  CHECK(compute_alpha_beta(cs0, eta, kRbar, 4.0).first ==
        doctest::Approx(0.0));

  // All offsets vanish.
  ConstraintSpec cs_zero = benchmark_constraints(0.0);
  cs_zero.xa_bar = 1e-9;
  cs_zero.x_bar = 1.0;
  CHECK(compute_alpha_beta(cs_zero, eta, 0.0, 4.0).second ==
        doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("check_c1: published pairs") {
  // (3, 2) with alpha = 1, beta = 1: margin 0 -> infeasible (strict).
  const auto [ok32, m32] = check_c1(3.0, 2.0, 1.0, 1.0);
  CHECK_FALSE(ok32);
  CHECK(m32 == doctest::Approx(0.0));

  const auto [ok105, m105] = check_c1(10.0, 5.0, 1.0, 1.0);
  CHECK(ok105);
  CHECK(m105 == doctest::Approx(4.0));

  const auto [okneg, mneg] = check_c1(10.0, 5.0, -1.0, 1.0);
  CHECK(okneg);
  CHECK(mneg == doctest::Approx(14.0));
}

TEST_CASE("min_input_bound: benchmark 11.5 at d_bar = 1") {
  const Matrix q = Matrix::identity(4);
  const Matrix p = solve_lyapunov(test_systems::reference_a(), q);
  const double eta = compute_eta(q, p, test_systems::plant_b());
  const auto [alpha, beta] =
      compute_alpha_beta(benchmark_constraints(1.0), eta, kRbar, 4.0);
  const double min_u = min_input_bound(6.5, alpha, beta);
  CHECK(min_u == doctest::Approx(11.5).epsilon(0.2 / 11.5));

  CHECK(min_input_bound(4.0, 0.0, 0.7) == doctest::Approx(0.7));
  // Continuity toward x_bar -> xa_bar.
  CHECK(min_input_bound(6.4, 1.5, 1.0) ==
        doctest::Approx(1.5 * 6.4 + 1.0).epsilon(1e-12));
}

TEST_CASE("max_state_bound: classification") {
  // alpha > 0: (12 - 1.2) / 1.58.
  const StateBound sb = max_state_bound(12.0, 1.58, 1.2, 6.4);
  CHECK(sb.kind == StateBoundKind::kBounded);
  CHECK(sb.value == doctest::Approx((12.0 - 1.2) / 1.58).epsilon(1e-12));
  CHECK(sb.admits(6.5));
  CHECK_FALSE(sb.admits(7.0));

  // alpha < 0 with headroom: unbounded.
  const StateBound un = max_state_bound(10.0, -1.0, 1.0, 6.4);
  CHECK(un.kind == StateBoundKind::kUnbounded);

  // alpha > 0, u_bar <= beta and limit below xa_bar: nothing admissible.
  const StateBound inf = max_state_bound(0.5, 1.0, 1.0, 6.4);
  CHECK(inf.kind == StateBoundKind::kInfeasibleForAll);

  // alpha <  0 without headroom: admissible above the crossing point.
  const StateBound lb = max_state_bound(1.0, -0.1, 2.0, 1.0);
  CHECK(lb.kind == StateBoundKind::kLowerBounded);
  CHECK(lb.value == doctest::Approx((1.0 - 2.0) / -0.1).epsilon(1e-12));
  CHECK(lb.admits(11.0));
  CHECK_FALSE(lb.admits(9.0));
}

TEST_CASE("state_only_condition") {
  // d_bar = 0 degenerates to x_bar > xa_bar.
  ConstraintSpec cs = benchmark_constraints(0.0);
  const Matrix p = Matrix::identity(4) * 2.0;
  const Matrix q = Matrix::identity(4);
  const auto [ok0, th0] = state_only_condition(cs, p, q);
  CHECK(th0 == doctest::Approx(cs.xa_bar));
  CHECK(ok0);

  // lambda_max{P} = 2, lambda_min{Q} = 1, d_bar = 1: threshold 10.4.
  ConstraintSpec cs1 = benchmark_constraints(1.0);
  const auto [ok1, th1] = state_only_condition(cs1, p, q);
  CHECK(th1 == doctest::Approx(10.4).epsilon(1e-12));
  CHECK_FALSE(ok1);

  // Benchmark P at d_bar = 1.2: frozen threshold 6.4 + 2*18.229148*1.2.
  const Matrix pb = solve_lyapunov(test_systems::reference_a(), q);
  ConstraintSpec cs2 = benchmark_constraints(1.2);
  const auto [ok2, th2] = state_only_condition(cs2, pb, q);
  CHECK(th2 == doctest::Approx(6.4 + 2.0 * 18.229148008001363 * 1.2)
                   .epsilon(1e-9));
  CHECK_FALSE(ok2);
}

TEST_CASE("input_only_bound") {
  ConstraintSpec cs = benchmark_constraints(0.0);
  cs.kx_bar = 1e-12;  // validate_constraints wants > 0; effectively zero
  cs.kr_bar = 1e-12;
  cs.x0_bar = 1.0;
  CHECK(input_only_bound(cs, 0.0, 4.0) == doctest::Approx(0.0).epsilon(1e-9));

  // Benchmark arithmetic: 1.6*6.4 + 0.6*sqrt(2) + 1.2/4.
  ConstraintSpec csb = benchmark_constraints(1.2);
  csb.x0_bar = 6.4;
  CHECK(input_only_bound(csb, kRbar, 4.0) ==
        doctest::Approx(1.6 * 6.4 + 0.6 * std::sqrt(2.0) + 0.3)
            .epsilon(1e-12));

  ConstraintSpec no_x0 = benchmark_constraints(1.2);
  CHECK_THROWS_AS(input_only_bound(no_x0, kRbar, 4.0), MissingX0);
}

TEST_CASE("reduction identity: alpha = 0 makes C1 equal the input-only bound") {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    ConstraintSpec cs;
    cs.xa_bar = pos(rng);
    cs.x_bar = cs.xa_bar + pos(rng);
    cs.u_bar = pos(rng);
    cs.d_bar = pos(rng);
    cs.kr_bar = pos(rng);
    const double eta = pos(rng);
    cs.kx_bar = eta;  // alpha = 0
    cs.x0_bar = cs.xa_bar;
    const double r_bar = pos(rng);
    const double b_norm = pos(rng);
    const auto [alpha, beta] = compute_alpha_beta(cs, eta, r_bar, b_norm);
    CHECK(alpha == doctest::Approx(0.0).epsilon(1e-15));
    const double c1_rhs = min_input_bound(cs.x_bar, alpha, beta);
    const double sc2 = input_only_bound(cs, r_bar, b_norm);
    CHECK(c1_rhs == doctest::Approx(sc2).epsilon(1e-12));
  }
}

TEST_CASE("three formulations of C1 agree (property)") {
  std::mt19937_64 rng(40904);
  std::uniform_real_distribution<double> pos(0.05, 8.0);
  std::uniform_real_distribution<double> alpha_draw(-3.0, 3.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double alpha = alpha_draw(rng);
    const double beta = pos(rng);
    const double xa_bar = pos(rng);
    const double x_bar = xa_bar + pos(rng);
    const double u_bar = pos(rng);

    const bool direct = check_c1(u_bar, x_bar, alpha, beta).first;
    const bool via_min_u = u_bar > min_input_bound(x_bar, alpha, beta);
    const bool via_region =
        max_state_bound(u_bar, alpha, beta, xa_bar).admits(x_bar);
    CHECK(direct == via_min_u);
    CHECK(direct == via_region);
  }
}

TEST_CASE("build_region_grid: published pairs and monotonicity") {
  const RegionGrid grid =
      build_region_grid({0.5, 12.0}, {0.5, 8.0}, 1.0, 1.0, 40);

  const auto classify = [&](double u, double x) {
    // Nearest grid indices for exact-value probes.
    std::size_t iu = 0, ix = 0;
    for (std::size_t i = 0; i < grid.u_axis.size(); ++i)
      if (std::abs(grid.u_axis[i] - u) < std::abs(grid.u_axis[iu] - u)) iu = i;
    for (std::size_t j = 0; j < grid.x_axis.size(); ++j)
      if (std::abs(grid.x_axis[j] - x) < std::abs(grid.x_axis[ix] - x)) ix = j;
    return grid.feasible[iu][ix];
  };
  CHECK_FALSE(classify(3.0, 2.0));
  CHECK(classify(10.0, 5.0));

  // Monotonicity in u_bar for every column.
  for (std::size_t j = 0; j < grid.x_axis.size(); ++j) {
    bool seen_feasible = false;
    for (std::size_t i = 0; i < grid.u_axis.size(); ++i) {
      if (seen_feasible) CHECK(grid.feasible[i][j]);
      if (grid.feasible[i][j]) seen_feasible = true;
    }
  }
}

TEST_CASE("build_region_grid: alpha = 0 rows identical, beta shifts linearly") {
  const RegionGrid g0 = build_region_grid({1.0, 5.0}, {1.0, 9.0}, 0.0, 2.0, 17);
  for (std::size_t i = 0; i < g0.u_axis.size(); ++i) {
    for (std::size_t j = 1; j < g0.x_axis.size(); ++j)
      CHECK(g0.feasible[i][j] == g0.feasible[i][0]);
  }

  // Increasing beta by delta shifts the minimum feasible u_bar by delta.
  const double delta = 0.5;
  const RegionGrid g1 =
      build_region_grid({1.0, 5.0}, {1.0, 9.0}, 1.0, 1.0, 33);
  const RegionGrid g2 =
      build_region_grid({1.0 + delta, 5.0 + delta}, {1.0, 9.0}, 1.0,
                        1.0 + delta, 33);
  for (std::size_t i = 0; i < g1.u_axis.size(); ++i)
    for (std::size_t j = 0; j < g1.x_axis.size(); ++j)
      CHECK(g1.feasible[i][j] == g2.feasible[i][j]);
}

TEST_CASE("monotonicity of feasibility in u_bar and x_bar (property)") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> pos(0.05, 6.0);
  std::uniform_real_distribution<double> alpha_draw(-2.0, 2.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double alpha = alpha_draw(rng);
    const double beta = pos(rng);
    const double x_bar = pos(rng) + 0.5;
    const double u_bar = pos(rng);
    if (!check_c1(u_bar, x_bar, alpha, beta).first) continue;
    // Raising u_bar preserves feasibility.
    CHECK(check_c1(u_bar + pos(rng), x_bar, alpha, beta).first);
    // For alpha > 0, shrinking x_bar preserves feasibility.
    if (alpha > 0.0) {
      const double smaller = x_bar * 0.5;
      CHECK(check_c1(u_bar, smaller, alpha, beta).first);
    } else if (alpha < 0.0) {
      // Direction reverses: growing x_bar preserves feasibility.
      CHECK(check_c1(u_bar, x_bar + pos(rng), alpha, beta).first);
    }
  }
}

TEST_CASE("beta increases in d_bar, r_bar and xa_bar (property)") {
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    ConstraintSpec cs = benchmark_constraints(pos(rng));
    const double eta = pos(rng) * 0.1;
    const double r_bar = pos(rng);
    const double b_norm = pos(rng);
    const double beta0 = compute_alpha_beta(cs, eta, r_bar, b_norm).second;

    ConstraintSpec cs_d = cs;
    cs_d.d_bar += pos(rng);
    CHECK(compute_alpha_beta(cs_d, eta, r_bar, b_norm).second > beta0);

    CHECK(compute_alpha_beta(cs, eta, r_bar + pos(rng), b_norm).second >
          beta0);

    ConstraintSpec cs_xa = cs;
    cs_xa.xa_bar += pos(rng);
    CHECK(compute_alpha_beta(cs_xa, eta, r_bar, b_norm).second > beta0);
  }
}

TEST_CASE("assess_feasibility: benchmark report") {
  const Matrix q = Matrix::identity(4);
  const Matrix p = solve_lyapunov(test_systems::reference_a(), q);
  const Matrix b = test_systems::plant_b();
  const FeasibilityReport rep =
      assess_feasibility(benchmark_constraints(1.2), q, p, b, kRbar);

  CHECK(rep.c1_satisfied);
  CHECK(rep.c1_margin > 0.0);
  CHECK(rep.case_label == FeasibilityCase::kCase21);  // sigma >> 0
  CHECK(rep.sigma > 0.0);
  CHECK(rep.varrho > 0.0);
  CHECK(rep.min_u_bar < 12.0);
  CHECK(rep.max_x_bar.kind == StateBoundKind::kBounded);
  CHECK(rep.max_x_bar.admits(6.5));
  CHECK(rep.xi == doctest::Approx(0.1).epsilon(1e-10));

  // Dropping u_bar to 11.0 at d_bar = 1 becomes infeasible (minimum 11.5).
  ConstraintSpec tight = benchmark_constraints(1.0);
  tight.u_bar = 11.0;
  const FeasibilityReport rep2 = assess_feasibility(tight, q, p, b, kRbar);
  CHECK_FALSE(rep2.c1_satisfied);
}
