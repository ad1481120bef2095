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

#include "mracsim/sim_engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mracsim/feasibility.hpp"
#include "mracsim/numerics.hpp"

namespace mracsim {

namespace {

constexpr int kMaxHalvings = 10;

struct Outputs {
  Vector x, x_r, x_a, u, d;
  Vector e;
  double v_norm = 0.0;
  double delta_u_norm = 0.0;
  double e_norm = 0.0;
  double eTPe = 0.0;
  double blf_v1 = 0.0;
  double khat_x_fro = 0.0;
  double khat_r_fro = 0.0;
};

Outputs evaluate_outputs(const SimConfig& cfg, const Matrix& p, double xi_p,
                         double t, const Vector& packed) {
  const std::size_t n = cfg.plant.n();
  const std::size_t m = cfg.plant.m();
  Outputs o;
  Matrix khx, khr;
  unpack_state(packed, n, m, &o.x, &o.x_r, &khx, &khr);

  const Vector r = eval_reference(cfg.reference_signal, t, m);
  o.x_a = auxiliary_reference(o.x_r, cfg.constraints, cfg.aux_variant);
  o.e = o.x - o.x_a;
  const Vector v = auxiliary_control(ControllerState{khx, khr}, o.x, r);
  o.u = saturate(v, cfg.constraints.u_bar);
  o.d = eval_disturbance(cfg.disturbance, t, n);
  o.v_norm = v.norm();
  o.delta_u_norm = (o.u - v).norm();
  o.e_norm = o.e.norm();
  o.eTPe = dot(o.e, p * o.e);
  const double xi_p2 = xi_p * xi_p;
  o.blf_v1 = o.eTPe < xi_p2 * (1.0 - tolerances().barrier_guard)
                 ? 0.5 * std::log(xi_p2 / (xi_p2 - o.eTPe))
                 : std::numeric_limits<double>::infinity();
  o.khat_x_fro = khx.frobenius_norm();
  o.khat_r_fro = khr.frobenius_norm();
  return o;
}

LogRecord make_record(double t, const Outputs& o, bool clamp_flag) {
  LogRecord rec;
  rec.t = t;
  rec.x = o.x;
  rec.x_r = o.x_r;
  rec.x_a = o.x_a;
  rec.u = o.u;
  rec.d = o.d;
  rec.v_norm = o.v_norm;
  rec.delta_u_norm = o.delta_u_norm;
  rec.e_norm = o.e_norm;
  rec.eTPe = o.eTPe;
  rec.blf_v1 = o.blf_v1;
  rec.khat_x_fro = o.khat_x_fro;
  rec.khat_r_fro = o.khat_r_fro;
  rec.clamp_triggered = clamp_flag;
  return rec;
}

struct MetricsAccumulator {
  const ConstraintSpec* cs = nullptr;
  double xi_p2 = 0.0;
  SummaryMetrics m;
  std::size_t steps = 0;
  std::size_t saturated_steps = 0;

  void observe(const Outputs& o) {
    m.max_x_norm = std::max(m.max_x_norm, o.x.norm());
    m.max_u_norm = std::max(m.max_u_norm, o.u.norm());
    m.max_v_norm = std::max(m.max_v_norm, o.v_norm);
    m.max_e_norm = std::max(m.max_e_norm, o.e_norm);
    m.max_eTPe_over_xiprime2 =
        std::max(m.max_eTPe_over_xiprime2, o.eTPe / xi_p2);
    m.final_e_norm = o.e_norm;
    ++steps;
    if (o.v_norm > cs->u_bar) ++saturated_steps;
  }

  SummaryMetrics finish(std::size_t clamp_count) {
    m.state_constraint_ok = m.max_x_norm < cs->x_bar;
    m.input_constraint_ok = m.max_u_norm <= cs->u_bar + 1e-12;
    m.omega_e_ok = m.max_eTPe_over_xiprime2 < 1.0;
    m.saturation_fraction =
        steps == 0 ? 0.0
                   : static_cast<double>(saturated_steps) /
                         static_cast<double>(steps);
    m.clamp_count = clamp_count;
    return m;
  }
};

void validate_sim_config(const SimConfig& cfg) {
  validate_plant(cfg.plant);
  const std::size_t n = cfg.plant.n();
  const std::size_t m = cfg.plant.m();
  validate_reference(cfg.reference, n, m);
  validate_constraints(cfg.constraints);
  if (cfg.gamma_x.rows() != m || cfg.gamma_x.cols() != m ||
      cfg.gamma_r.rows() != m || cfg.gamma_r.cols() != m)
    throw InvalidConfig("gamma matrices must be m x m");
  if (eig_sym_extremes(cfg.gamma_x).first <= 0.0 ||
      eig_sym_extremes(cfg.gamma_r).first <= 0.0)
    throw InvalidConfig("gamma matrices must be symmetric positive definite");
  if (cfg.q.rows() != n || cfg.q.cols() != n ||
      eig_sym_extremes(cfg.q).first <= 0.0)
    throw InvalidConfig("Q must be n x n symmetric positive definite");
  if (!(cfg.projection_epsilon > 0.0) || !(cfg.projection_epsilon < 1.0))
    throw InvalidConfig("projection_epsilon must lie in (0, 1)");
  if (cfg.x0.size() != n || cfg.xr0.size() != n)
    throw InvalidConfig("x0 and xr0 must be n-vectors");
  if (!(cfg.dt > 0.0)) throw InvalidConfig("sim.dt must be > 0");
  if (!(cfg.t_end > 0.0)) throw InvalidConfig("sim.t_end must be > 0");
  if (cfg.log_stride == 0) throw InvalidConfig("sim.log_stride must be >= 1");
  if (cfg.reference_signal.dim() != m)
    throw InvalidConfig("signals.reference must have m channels");
  if (cfg.disturbance.base.dim() != n)
    throw InvalidConfig("signals.disturbance must have n channels");
  if (!(cfg.disturbance.norm_cap > 0.0) && cfg.constraints.d_bar > 0.0)
    throw InvalidConfig("signals.disturbance.cap must be > 0");
  if (!cfg.khat_x0.empty() &&
      (cfg.khat_x0.rows() != m || cfg.khat_x0.cols() != n))
    throw InvalidConfig("controller.khat_x0 must be m x n");
  if (!cfg.khat_r0.empty() &&
      (cfg.khat_r0.rows() != m || cfg.khat_r0.cols() != m))
    throw InvalidConfig("controller.khat_r0 must be m x m");
  if (!cfg.khat_x0.empty() &&
      cfg.khat_x0.frobenius_norm() > cfg.constraints.kx_bar)
    throw InvalidConfig("controller.khat_x0 must start inside the kx_bar ball");
  if (!cfg.khat_r0.empty() &&
      cfg.khat_r0.frobenius_norm() > cfg.constraints.kr_bar)
    throw InvalidConfig("controller.khat_r0 must start inside the kr_bar ball");
  if (cfg.constraints.x0_bar && cfg.x0.norm() >= *cfg.constraints.x0_bar)
    throw InvalidConfig("||x0|| must be < x0_bar when x0_bar is declared");
}

}  // namespace

Vector pack_state(const Vector& x, const Vector& x_r, const Matrix& khat_x,
                  const Matrix& khat_r) {
  const std::size_t n = x.size();
  const std::size_t m = khat_x.rows();
  if (x_r.size() != n || khat_x.cols() != n || khat_r.rows() != m ||
      khat_r.cols() != m)
    throw DimensionMismatch("pack_state: dimension mismatch");
  Vector packed(n + n + m * n + m * m);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) packed[idx++] = x[i];
  for (std::size_t i = 0; i < n; ++i) packed[idx++] = x_r[i];
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < m; ++r) packed[idx++] = khat_x(r, c);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < m; ++r) packed[idx++] = khat_r(r, c);
  return packed;
}

void unpack_state(const Vector& packed, std::size_t n, std::size_t m,
                  Vector* x, Vector* x_r, Matrix* khat_x, Matrix* khat_r) {
  if (packed.size() != n + n + m * n + m * m)
    throw DimensionMismatch("unpack_state: packed length " +
                            std::to_string(packed.size()) +
                            " does not match dims");
  *x = Vector(n);
  *x_r = Vector(n);
  *khat_x = Matrix(m, n);
  *khat_r = Matrix(m, m);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) (*x)[i] = packed[idx++];
  for (std::size_t i = 0; i < n; ++i) (*x_r)[i] = packed[idx++];
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < m; ++r) (*khat_x)(r, c) = packed[idx++];
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < m; ++r) (*khat_r)(r, c) = packed[idx++];
}

Vector closed_loop_derivative(const SimConfig& cfg, const Matrix& p,
                              double xi_p, double t, const Vector& packed) {
  const std::size_t n = cfg.plant.n();
  const std::size_t m = cfg.plant.m();
  Vector x, x_r;
  Matrix khx, khr;
  unpack_state(packed, n, m, &x, &x_r, &khx, &khr);

  const Vector r = eval_reference(cfg.reference_signal, t, m);
  const Vector x_a = auxiliary_reference(x_r, cfg.constraints, cfg.aux_variant);
  const Vector e = x - x_a;
  const Vector v = auxiliary_control(ControllerState{khx, khr}, x, r);
  const Vector u = saturate(v, cfg.constraints.u_bar);
  const Vector d = eval_disturbance(cfg.disturbance, t, n);

  ControllerGains gains{cfg.gamma_x, cfg.gamma_r, cfg.q, p, cfg.law};
  GainRates raw = cfg.law == ControlLaw::kBlf
                      ? blf_raw_rates(gains, cfg.plant.B, e, x, r, xi_p)
                      : classical_raw_rates(gains, cfg.plant.B, e, x, r);
  const Matrix khx_dot =
      project(khx, raw.khat_x_dot,
              ProjectionParams{cfg.constraints.kx_bar, cfg.projection_epsilon});
  const Matrix khr_dot =
      project(khr, raw.khat_r_dot,
              ProjectionParams{cfg.constraints.kr_bar, cfg.projection_epsilon});

  const Vector x_dot = plant_derivative(cfg.plant, x, u, d);
  const Vector xr_dot = reference_derivative(cfg.reference, x_r, r);
  return pack_state(x_dot, xr_dot, khx_dot, khr_dot);
}

RunResult run_scenario(const SimConfig& cfg) {
  validate_sim_config(cfg);
  const std::size_t n = cfg.plant.n();
  const std::size_t m = cfg.plant.m();

  RunResult result;
  result.p = solve_lyapunov(cfg.reference.A_r, cfg.q);
  result.lambda_min_p = eig_sym_extremes(result.p).first;
  result.xi_prime = xi_prime(cfg.constraints, result.lambda_min_p);
  result.r_bar =
      sup_norm_bound(cfg.reference_signal, cfg.t_end, kSupNormSamples);
  const Matrix& p = result.p;
  const double xi_p = result.xi_prime;
  const double xi_p2 = xi_p * xi_p;

  // C1 gate applies to the constrained law only.
  if (cfg.law == ControlLaw::kBlf && !cfg.override_feasibility) {
    const double eta = compute_eta(cfg.q, p, cfg.plant.B);
    const double b_norm = spectral_norm(cfg.plant.B);
    const auto [alpha, beta] =
        compute_alpha_beta(cfg.constraints, eta, result.r_bar, b_norm);
    const auto [ok, margin] =
        check_c1(cfg.constraints.u_bar, cfg.constraints.x_bar, alpha, beta);
    if (!ok)
      throw InfeasibleConfig(
          "C1 fails (margin " + std::to_string(margin) +
          "); pass override_feasibility to simulate anyway");
  }

  Matrix khx = cfg.khat_x0.empty() ? Matrix(m, n) : cfg.khat_x0;
  Matrix khr = cfg.khat_r0.empty() ? Matrix(m, m) : cfg.khat_r0;
  Vector y = pack_state(cfg.x0, cfg.xr0, khx, khr);

  // Theorem hypothesis e(0) in Omega_e'.
  {
    const Vector x_a0 =
        auxiliary_reference(cfg.xr0, cfg.constraints, cfg.aux_variant);
    const Vector e0 = cfg.x0 - x_a0;
    const double e0pe0 = dot(e0, p * e0);
    if (cfg.law == ControlLaw::kBlf &&
        e0pe0 >= xi_p2 * (1.0 - tolerances().barrier_guard))
      throw InvalidConfig("e(0) lies outside Omega_e' (e'Pe = " +
                          std::to_string(e0pe0) + ", xi'^2 = " +
                          std::to_string(xi_p2) + ")");
  }

  const auto deriv = [&](double t, const Vector& packed) {
    return closed_loop_derivative(cfg, p, xi_p, t, packed);
  };

  const long long n_steps = std::llround(cfg.t_end / cfg.dt);
  MetricsAccumulator acc;
  acc.cs = &cfg.constraints;
  acc.xi_p2 = xi_p2;

  std::size_t clamp_count = 0;
  bool clamp_since_log = false;

  Trajectory traj;
  {
    const Outputs o0 = evaluate_outputs(cfg, p, xi_p, 0.0, y);
    acc.observe(o0);
    traj.records.push_back(make_record(0.0, o0, false));
  }

  // Clamps the gain blocks of `y` back onto their Frobenius balls.
  const auto clamp_gains = [&](Vector* state) {
    bool any = false;
    const std::size_t off_x = 2 * n;
    const std::size_t len_x = m * n;
    const std::size_t off_r = off_x + len_x;
    const std::size_t len_r = m * m;
    const auto clamp_block = [&](std::size_t off, std::size_t len,
                                 double bound) {
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i)
        s += (*state)[off + i] * (*state)[off + i];
      const double norm = std::sqrt(s);
      if (norm > bound) {
        const double f = bound / norm;
        for (std::size_t i = 0; i < len; ++i) (*state)[off + i] *= f;
        any = true;
      }
    };
    clamp_block(off_x, len_x, cfg.constraints.kx_bar);
    clamp_block(off_r, len_r, cfg.constraints.kr_bar);
    return any;
  };

  double current_time = 0.0;
  for (long long i = 0; i < n_steps && !traj.aborted; ++i) {
    const double t0 = static_cast<double>(i) * cfg.dt;
    double tau = 0.0;      // progress within this grid step
    double sub = cfg.dt;   // current substep size
    int halvings = 0;

    while (tau < cfg.dt - 1e-15 * cfg.dt) {
      const double h = std::min(sub, cfg.dt - tau);
      const double t = t0 + tau;
      bool breached = false;
      Vector y_new;
      try {
        y_new = rk4_step(deriv, t, y, h);
        if (cfg.law == ControlLaw::kBlf) {
          Vector x_new, xr_new;
          Matrix kx_new, kr_new;
          unpack_state(y_new, n, m, &x_new, &xr_new, &kx_new, &kr_new);
          const Vector e_new =
              x_new -
              auxiliary_reference(xr_new, cfg.constraints, cfg.aux_variant);
          if (dot(e_new, p * e_new) >=
              xi_p2 * (1.0 - tolerances().barrier_guard))
            breached = true;
        }
      } catch (const BarrierBreach&) {
        breached = true;
      }
      if (breached) {
        if (++halvings > kMaxHalvings) {
          traj.aborted = true;
          traj.abort_time = t;
          traj.abort_reason =
              "barrier breach persisted after " +
              std::to_string(kMaxHalvings) + " step halvings";
          break;
        }
        sub *= 0.5;
        continue;
      }
      y = y_new;
      tau += h;
      current_time = t0 + tau;
      if (clamp_gains(&y)) {
        ++clamp_count;
        clamp_since_log = true;
      }
      acc.observe(evaluate_outputs(cfg, p, xi_p, current_time, y));
    }

    if (traj.aborted) break;
    const long long done = i + 1;
    if (done % static_cast<long long>(cfg.log_stride) == 0 ||
        done == n_steps) {
      const double t_log = static_cast<double>(done) * cfg.dt;
      const Outputs o = evaluate_outputs(cfg, p, xi_p, t_log, y);
      traj.records.push_back(make_record(t_log, o, clamp_since_log));
      clamp_since_log = false;
    }
  }

  if (traj.aborted) {
    const Outputs o = evaluate_outputs(cfg, p, xi_p, current_time, y);
    traj.records.push_back(make_record(current_time, o, clamp_since_log));
    result.status = RunStatus::kBarrierAbort;
  }

  result.metrics = acc.finish(clamp_count);
  result.trajectory = std::move(traj);
  return result;
}

SummaryMetrics compute_metrics(const Trajectory& traj,
                               const ConstraintSpec& cs, const Matrix& p) {
  if (traj.records.empty())
    throw EmptyTrajectory("compute_metrics: no records");
  const double lambda_min_p = eig_sym_extremes(p).first;
  const double xi_p = xi_prime(cs, lambda_min_p);

  MetricsAccumulator acc;
  acc.cs = &cs;
  acc.xi_p2 = xi_p * xi_p;
  std::size_t clamp_count = 0;
  for (const LogRecord& rec : traj.records) {
    Outputs o;
    o.x = rec.x;
    o.u = rec.u;
    o.v_norm = rec.v_norm;
    o.e_norm = rec.e_norm;
    o.eTPe = rec.eTPe;
    acc.observe(o);
    if (rec.clamp_triggered) ++clamp_count;
  }
  return acc.finish(clamp_count);
}

}  // namespace mracsim
