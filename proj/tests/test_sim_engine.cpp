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

#include "mracsim/numerics.hpp"
#include "mracsim/sim_engine.hpp"
#include "test_systems.hpp"

using namespace mracsim;

namespace {

// The benchmark scenario (same data as presets/paper_sec5.json).
SimConfig benchmark_config() {
  SimConfig cfg;
  cfg.plant = {test_systems::plant_a(), test_systems::plant_b()};
  cfg.reference = {test_systems::reference_a(), test_systems::reference_b()};
  cfg.constraints.x_bar = 6.5;
  cfg.constraints.u_bar = 12.0;
  cfg.constraints.xa_bar = 6.4;
  cfg.constraints.d_bar = 1.2;
  cfg.constraints.kx_bar = 1.6;
  cfg.constraints.kr_bar = 0.6;
  cfg.gamma_x = Matrix::identity(2) * 5.0;
  cfg.gamma_r = Matrix::identity(2) * 5.0;
  cfg.q = Matrix::identity(4);
  cfg.law = ControlLaw::kBlf;
  cfg.aux_variant = AuxVariant::kSelfConsistent;
  cfg.projection_epsilon = 0.1;
  cfg.reference_signal.channels = {{ExponentialTerm{1.0, 10.0}},
                                   {ExponentialTerm{1.0, 20.0}}};
  cfg.disturbance.base.channels = {
      {},
      {SinusoidTerm{0.85, 1.7, -34.0}},
      {},
      {SinusoidTerm{0.75, 1.1, -22.0}}};
  cfg.disturbance.onset = 20.0;
  cfg.disturbance.norm_cap = 1.2;
  cfg.disturbance.seed = 1;
  cfg.x0 = Vector{-2.0877568589173321, 2.8996623040518501,
                  -4.5184737765552798, 2.2927329873072049};
  cfg.xr0 = cfg.x0;
  cfg.t_end = 2.0;
  cfg.dt = 1e-3;
  cfg.log_stride = 10;
  return cfg;
}

SimConfig classical_config() {
  SimConfig cfg = benchmark_config();
  cfg.law = ControlLaw::kClassical;
  cfg.gamma_x = Matrix::identity(2) * 15.0;
  cfg.gamma_r = Matrix::identity(2) * 15.0;
  return cfg;
}

}  // namespace

TEST_CASE("pack/unpack round trip") {
  // Scalar case: everything lands in order.
  const Vector p1 = pack_state(Vector{1.0}, Vector{2.0},
                               Matrix::from_rows({{3.0}}),
                               Matrix::from_rows({{4.0}}));
  CHECK(p1.size() == 4);
  CHECK(p1[0] == 1.0);
  CHECK(p1[1] == 2.0);
  CHECK(p1[2] == 3.0);
  CHECK(p1[3] == 4.0);

  // Benchmark dims: 4 + 4 + 8 + 4 = 20.
  Matrix khx(2, 4), khr(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) khx(i, j) = 10.0 * i + j;
  khr(0, 1) = -7.0;
  const Vector packed =
      pack_state(Vector{1, 2, 3, 4}, Vector{5, 6, 7, 8}, khx, khr);
  CHECK(packed.size() == 20);

  Vector x, xr;
  Matrix kx, kr;
  unpack_state(packed, 4, 2, &x, &xr, &kx, &kr);
  CHECK((kx - khx).frobenius_norm() == 0.0);
  CHECK((kr - khr).frobenius_norm() == 0.0);
  CHECK(x[2] == 3.0);
  CHECK(xr[3] == 8.0);

  const Vector zero = pack_state(Vector(4), Vector(4), Matrix(2, 4),
                                 Matrix(2, 2));
  CHECK(zero.norm() == 0.0);

  CHECK_THROWS_AS(unpack_state(Vector(7), 4, 2, &x, &xr, &kx, &kr),
                  DimensionMismatch);
}

TEST_CASE("closed_loop_derivative: e = 0 kills adaptation") {
  SimConfig cfg = benchmark_config();
  const Matrix p = solve_lyapunov(cfg.reference.A_r, cfg.q);
  const double xi_p =
      xi_prime(cfg.constraints, eig_sym_extremes(p).first);

  // x = x_r below the threshold, so x_a = x_r and e = 0.
  const Vector y =
      pack_state(cfg.x0, cfg.x0, Matrix(2, 4), Matrix(2, 2));
  const Vector dy = closed_loop_derivative(cfg, p, xi_p, 0.0, y);
  // Gain-rate blocks are zero.
  for (std::size_t i = 8; i < 20; ++i) CHECK(dy[i] == doctest::Approx(0.0));
  // Plant derivative equals A x (+ B u with u = 0 here since Khat = 0).
  const Vector ax = cfg.plant.A * cfg.x0;
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(dy[i] == doctest::Approx(ax[i]).epsilon(1e-12));
}

TEST_CASE("closed_loop_derivative: true gains give perfect matching") {
  SimConfig cfg = benchmark_config();
  const Matrix p = solve_lyapunov(cfg.reference.A_r, cfg.q);
  const double xi_p =
      xi_prime(cfg.constraints, eig_sym_extremes(p).first);
  const TrueGains g = compute_true_gains(cfg.plant, cfg.reference);

  // Khat_r outside its ball would be rejected by run_scenario, but the
  // derivative map itself accepts any state.
  const Vector y = pack_state(cfg.x0, cfg.x0, g.K_x, g.K_r);
  const Vector dy = closed_loop_derivative(cfg, p, xi_p, 0.0, y);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(dy[i] == doctest::Approx(dy[4 + i]).epsilon(1e-9));
}

TEST_CASE("closed_loop_derivative: saturation branch") {
  SimConfig cfg = benchmark_config();
  const Matrix p = solve_lyapunov(cfg.reference.A_r, cfg.q);
  const double xi_p =
      xi_prime(cfg.constraints, eig_sym_extremes(p).first);

  // Large gains force ||v|| > u_bar.
  Matrix khx(2, 4);
  khx(0, 0) = 1.5;
  khx(1, 1) = 1.5;  // wait inside ball? Frobenius ~ 2.1 > kx_bar
  // Use gains inside the ball but a large state via x0 scaling.
  khx(0, 0) = 1.1;
  khx(1, 1) = 1.1;
  Vector x = cfg.x0;
  x *= 0.9;
  const Vector y = pack_state(cfg.x0, x, khx, Matrix(2, 2));

  Vector xx, xr;
  Matrix kx, kr;
  unpack_state(y, 4, 2, &xx, &xr, &kx, &kr);
  const Vector v =
      auxiliary_control(ControllerState{kx, kr}, xx,
                        eval_reference(cfg.reference_signal, 0.0, 2));
  const Vector u = saturate(v, cfg.constraints.u_bar);
  if (v.norm() > cfg.constraints.u_bar) {
    CHECK(std::abs(u.norm() - cfg.constraints.u_bar) <= 1e-12 * 12.0);
    CHECK((u - v).norm() > 0.0);
  } else {
    CHECK((u - v).norm() == 0.0);
  }
}

TEST_CASE("run_scenario: zero dynamics stay identically zero") {
  SimConfig cfg;
  cfg.plant = {Matrix(2, 2), Matrix::identity(2)};
  cfg.reference = {Matrix::identity(2) * -1.0, Matrix::identity(2)};
  cfg.constraints.x_bar = 1.0;
  cfg.constraints.u_bar = 1.0;
  cfg.constraints.xa_bar = 0.5;
  cfg.constraints.d_bar = 0.0;
  cfg.constraints.kx_bar = 1.0;
  cfg.constraints.kr_bar = 1.0;
  cfg.gamma_x = Matrix::identity(2);
  cfg.gamma_r = Matrix::identity(2);
  cfg.q = Matrix::identity(2);
  cfg.reference_signal.channels = {{ConstantTerm{0.0}}, {ConstantTerm{0.0}}};
  cfg.disturbance.base.channels = {{}, {}};
  cfg.disturbance.norm_cap = 1.0;
  cfg.x0 = Vector(2);
  cfg.xr0 = Vector(2);
  cfg.t_end = 1.0;
  cfg.dt = 1e-2;
  cfg.log_stride = 5;
  cfg.override_feasibility = true;  // beta = 0 edge: margin equals u_bar

  const RunResult res = run_scenario(cfg);
  CHECK(res.status == RunStatus::kOk);
  CHECK(res.metrics.max_x_norm == 0.0);
  CHECK(res.metrics.max_u_norm == 0.0);
  CHECK(res.metrics.max_e_norm == 0.0);
  for (const LogRecord& rec : res.trajectory.records)
    CHECK(rec.x.norm() == 0.0);
}

TEST_CASE("run_scenario: determinism (bit-identical repeat)") {
  SimConfig cfg = benchmark_config();
  cfg.t_end = 0.5;
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  REQUIRE(a.trajectory.records.size() == b.trajectory.records.size());
  for (std::size_t i = 0; i < a.trajectory.records.size(); ++i) {
    const LogRecord& ra = a.trajectory.records[i];
    const LogRecord& rb = b.trajectory.records[i];
    CHECK(ra.t == rb.t);
    for (std::size_t k = 0; k < ra.x.size(); ++k) {
      CHECK(ra.x[k] == rb.x[k]);
      CHECK(ra.x_r[k] == rb.x_r[k]);
    }
    CHECK(ra.eTPe == rb.eTPe);
    CHECK(ra.khat_x_fro == rb.khat_x_fro);
  }
}

TEST_CASE("run_scenario: classical law cross-check against independent run") {
  // Reference state computed by a separate implementation of the same
  // loop (fixed dt, no halving on the classical path).
  SimConfig cfg = classical_config();
  const RunResult res = run_scenario(cfg);
  CHECK(res.status == RunStatus::kOk);
  const LogRecord& last = res.trajectory.records.back();
  CHECK(last.t == doctest::Approx(2.0));
  CHECK(last.x[0] == doctest::Approx(1.2830906136810833).epsilon(1e-8));
  CHECK(last.x[1] == doctest::Approx(-2.9667538813170218).epsilon(1e-8));
  CHECK(last.x[2] == doctest::Approx(-3.0000130736118771).epsilon(1e-8));
  CHECK(last.x[3] == doctest::Approx(3.2833924007538373).epsilon(1e-8));
  CHECK(last.khat_x_fro ==
        doctest::Approx(0.66389899211241288).epsilon(1e-7));
  CHECK(last.khat_r_fro ==
        doctest::Approx(0.11917160535598174).epsilon(1e-7));
}

TEST_CASE("run_scenario: blf law cross-check (loose, halving-sensitive)") {
  SimConfig cfg = benchmark_config();
  const RunResult res = run_scenario(cfg);
  CHECK(res.status == RunStatus::kOk);
  const LogRecord& last = res.trajectory.records.back();
  CHECK(last.x[0] == doctest::Approx(1.2839223026847508).epsilon(2e-3));
  CHECK(last.x[1] == doctest::Approx(-2.954958723799519).epsilon(2e-3));
  CHECK(last.x[3] == doctest::Approx(3.2985796122095987).epsilon(2e-3));
  // Gain trajectories pass through the stiff barrier transient, where the
  // halving schedule differs between implementations; only a coarse check
  // is meaningful.
  CHECK(last.khat_x_fro == doctest::Approx(0.577386312546456).epsilon(0.1));
  // Constraint monitors all hold on this stretch.
  CHECK(res.metrics.omega_e_ok);
  CHECK(res.metrics.state_constraint_ok);
  CHECK(res.metrics.input_constraint_ok);
}

TEST_CASE("run_scenario: structural input bound and gain boundedness") {
  SimConfig cfg = benchmark_config();
  cfg.t_end = 1.0;
  for (ControlLaw law : {ControlLaw::kBlf, ControlLaw::kClassical}) {
    cfg.law = law;
    const RunResult res = run_scenario(cfg);
    CHECK(res.metrics.max_u_norm <= cfg.constraints.u_bar + 1e-12);
    for (const LogRecord& rec : res.trajectory.records) {
      CHECK(rec.u.norm() <= cfg.constraints.u_bar + 1e-12);
      CHECK(rec.khat_x_fro <= cfg.constraints.kx_bar + 1e-6);
      CHECK(rec.khat_r_fro <= cfg.constraints.kr_bar + 1e-6);
    }
  }
}

TEST_CASE("run_scenario: blf keeps e'Pe inside the barrier") {
  SimConfig cfg = benchmark_config();
  const RunResult res = run_scenario(cfg);
  const double xi_p2 = res.xi_prime * res.xi_prime;
  CHECK(res.metrics.max_eTPe_over_xiprime2 < 1.0);
  for (const LogRecord& rec : res.trajectory.records)
    CHECK(rec.eTPe < xi_p2);
}

TEST_CASE("run_scenario: barrier abort emits partial trajectory") {
  // The reference transient exceeds xa_bar, the auxiliary reference clips,
  // and the wall-ride exhausts the halving budget: designed abort path.
  SimConfig cfg = benchmark_config();
  cfg.x0 = Vector{3.3137779180532543, -1.9473491930214017,
                  -3.8254237303086653, -0.91806334958590297};
  cfg.xr0 = cfg.x0;
  cfg.t_end = 1.0;
  const RunResult res = run_scenario(cfg);
  CHECK(res.status == RunStatus::kBarrierAbort);
  CHECK(res.trajectory.aborted);
  CHECK(res.trajectory.abort_time > 0.0);
  CHECK(res.trajectory.abort_time < 1.0);
  CHECK(!res.trajectory.records.empty());
  CHECK(!res.trajectory.abort_reason.empty());
  // Even the aborted run never violated the monitored bounds.
  CHECK(res.metrics.max_x_norm < cfg.constraints.x_bar);
  CHECK(res.metrics.max_u_norm <= cfg.constraints.u_bar + 1e-12);
}

TEST_CASE("run_scenario: feasibility gate") {
  SimConfig cfg = benchmark_config();
  cfg.constraints.u_bar = 8.0;  // below the ~11.6 minimum at d_bar = 1.2
  cfg.t_end = 0.05;
  CHECK_THROWS_AS(run_scenario(cfg), InfeasibleConfig);

  cfg.override_feasibility = true;
  CHECK_NOTHROW(run_scenario(cfg));

  // Classical runs are never gated.
  SimConfig cls = classical_config();
  cls.constraints.u_bar = 8.0;
  cls.t_end = 0.05;
  CHECK_NOTHROW(run_scenario(cls));
}

TEST_CASE("run_scenario: rejects e(0) outside the barrier set") {
  SimConfig cfg = benchmark_config();
  cfg.x0 = Vector{-1.0877568589173321, 2.8996623040518501,
                  -4.5184737765552798, 2.2927329873072049};  // e(0) = e1
  CHECK_THROWS_AS(run_scenario(cfg), InvalidConfig);
}

TEST_CASE("compute_metrics: edge cases") {
  const Matrix p = Matrix::identity(4);
  ConstraintSpec cs;
  cs.x_bar = 6.5;
  cs.u_bar = 12.0;
  cs.xa_bar = 6.4;
  cs.d_bar = 0.0;
  cs.kx_bar = 1.0;
  cs.kr_bar = 1.0;

  Trajectory empty;
  CHECK_THROWS_AS(compute_metrics(empty, cs, p), EmptyTrajectory);

  Trajectory single;
  LogRecord zero;
  zero.x = Vector(4);
  zero.u = Vector(2);
  single.records.push_back(zero);
  const SummaryMetrics m = compute_metrics(single, cs, p);
  CHECK(m.max_x_norm == 0.0);
  CHECK(m.max_u_norm == 0.0);
  CHECK(m.state_constraint_ok);
  CHECK(m.input_constraint_ok);
  CHECK(m.omega_e_ok);

  // ||x|| equal to the bound is a violation (strict inequality).
  Trajectory at_bound = single;
  at_bound.records[0].x = Vector{6.5, 0.0, 0.0, 0.0};
  CHECK_FALSE(compute_metrics(at_bound, cs, p).state_constraint_ok);
}
