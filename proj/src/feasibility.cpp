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

#include "mracsim/feasibility.hpp"

#include <cmath>
#include <cstdio>

#include "mracsim/numerics.hpp"

namespace mracsim {

double compute_eta(const Matrix& q, const Matrix& p, const Matrix& b) {
  const double lambda_min_q = eig_sym_extremes(q).first;
  const double lambda_max_p = eig_sym_extremes(p).second;
  const double b_norm = spectral_norm(b);
  if (!(lambda_min_q > 0.0) || !(lambda_max_p > 0.0))
    throw Error("compute_eta: Q and P must be positive definite");
  if (!(b_norm > 0.0)) throw Error("compute_eta: B must be nonzero");
  return lambda_min_q / (2.0 * lambda_max_p * b_norm);
}

std::pair<double, double> compute_alpha_beta(const ConstraintSpec& cs,
                                             double eta, double r_bar,
                                             double b_norm) {
  if (!(eta > 0.0)) throw Error("compute_alpha_beta: eta must be > 0");
  const double alpha = cs.kx_bar - eta;
  const double beta =
      cs.kr_bar * r_bar + cs.d_bar / b_norm + cs.xa_bar * eta;
  return {alpha, beta};
}

std::pair<bool, double> check_c1(double u_bar, double x_bar, double alpha,
                                 double beta) {
  const double margin = u_bar - (alpha * x_bar + beta);
  return {margin > 0.0, margin};
}

double min_input_bound(double x_bar, double alpha, double beta) {
  return alpha * x_bar + beta;
}

StateBound max_state_bound(double u_bar, double alpha, double beta,
                           double xa_bar) {
  StateBound sb;
  if (alpha > 0.0) {
    const double limit = (u_bar - beta) / alpha;
    if (limit > xa_bar) {
      sb.kind = StateBoundKind::kBounded;
      sb.value = limit;
    } else {
      sb.kind = StateBoundKind::kInfeasibleForAll;
    }
    return sb;
  }
  if (u_bar > alpha * xa_bar + beta) {
    sb.kind = StateBoundKind::kUnbounded;
    return sb;
  }
  if (alpha < 0.0) {
    // C1 still holds for x_bar above (u_bar - beta) / alpha.
    sb.kind = StateBoundKind::kLowerBounded;
    sb.value = (u_bar - beta) / alpha;
    return sb;
  }
  sb.kind = StateBoundKind::kInfeasibleForAll;
  return sb;
}

std::pair<bool, double> state_only_condition(const ConstraintSpec& cs,
                                             const Matrix& p,
                                             const Matrix& q) {
  const double lambda_max_p = eig_sym_extremes(p).second;
  const double lambda_min_q = eig_sym_extremes(q).first;
  const double threshold =
      cs.xa_bar + 2.0 * lambda_max_p * cs.d_bar / lambda_min_q;
  return {cs.x_bar > threshold, threshold};
}

double input_only_bound(const ConstraintSpec& cs, double r_bar,
                        double b_norm) {
  if (!cs.x0_bar)
    throw MissingX0("input_only_bound: constraints.x0_bar is required");
  return cs.kx_bar * *cs.x0_bar + cs.kr_bar * r_bar + cs.d_bar / b_norm;
}

RegionGrid build_region_grid(std::pair<double, double> u_range,
                             std::pair<double, double> x_range, double alpha,
                             double beta, std::size_t resolution) {
  if (resolution < 2) throw Error("build_region_grid: resolution must be >= 2");
  if (!(u_range.first > 0.0) || !(x_range.first > 0.0))
    throw Error("build_region_grid: ranges must be positive");

  RegionGrid grid;
  grid.alpha = alpha;
  grid.beta = beta;
  grid.u_axis.resize(resolution);
  grid.x_axis.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double f = static_cast<double>(i) / (resolution - 1);
    grid.u_axis[i] = u_range.first + f * (u_range.second - u_range.first);
    grid.x_axis[i] = x_range.first + f * (x_range.second - x_range.first);
  }
  grid.feasible.assign(resolution, std::vector<bool>(resolution, false));
  for (std::size_t i = 0; i < resolution; ++i)
    for (std::size_t j = 0; j < resolution; ++j)
      grid.feasible[i][j] =
          check_c1(grid.u_axis[i], grid.x_axis[j], alpha, beta).first;
  return grid;
}

FeasibilityReport assess_feasibility(const ConstraintSpec& cs,
                                     const Matrix& q, const Matrix& p,
                                     const Matrix& b, double r_bar) {
  FeasibilityReport rep;
  rep.r_bar = r_bar;
  rep.b_norm = spectral_norm(b);
  rep.lambda_min_q = eig_sym_extremes(q).first;
  const auto p_ev = eig_sym_extremes(p);
  rep.lambda_min_p = p_ev.first;
  rep.lambda_max_p = p_ev.second;
  rep.xi = cs.xi();
  rep.xi_prime = xi_prime(cs, rep.lambda_min_p);

  rep.eta = compute_eta(q, p, b);
  std::tie(rep.alpha, rep.beta) =
      compute_alpha_beta(cs, rep.eta, r_bar, rep.b_norm);
  rep.sigma = cs.kx_bar / rep.eta - 1.0;
  rep.varrho = cs.u_bar - cs.kx_bar * cs.xa_bar - cs.kr_bar * r_bar -
               cs.d_bar / rep.b_norm;
  std::tie(rep.c1_satisfied, rep.c1_margin) =
      check_c1(cs.u_bar, cs.x_bar, rep.alpha, rep.beta);
  if (rep.sigma > 0.0)
    rep.case_label = FeasibilityCase::kCase21;
  else if (rep.varrho >= 0.0)
    rep.case_label = FeasibilityCase::kCase22VarrhoNonneg;
  else
    rep.case_label = FeasibilityCase::kCase22VarrhoNeg;
  rep.min_u_bar = min_input_bound(cs.x_bar, rep.alpha, rep.beta);
  rep.max_x_bar = max_state_bound(cs.u_bar, rep.alpha, rep.beta, cs.xa_bar);
  std::tie(rep.state_only_satisfied, rep.state_only_threshold) =
      state_only_condition(cs, p, q);
  if (cs.x0_bar)
    rep.input_only_min_u = input_only_bound(cs, r_bar, rep.b_norm);
  return rep;
}

std::string to_string(FeasibilityCase c) {
  switch (c) {
    case FeasibilityCase::kCase21:
      return "case_2_1";
    case FeasibilityCase::kCase22VarrhoNonneg:
      return "case_2_2_varrho_nonneg";
    case FeasibilityCase::kCase22VarrhoNeg:
      return "case_2_2_varrho_neg";
  }
  return "unknown";
}

std::string to_string(const StateBound& sb) {
  char buf[64];
  switch (sb.kind) {
    case StateBoundKind::kBounded:
      std::snprintf(buf, sizeof(buf), "x_bar < %.10g", sb.value);
      return buf;
    case StateBoundKind::kUnbounded:
      return "unbounded";
    case StateBoundKind::kLowerBounded:
      std::snprintf(buf, sizeof(buf), "x_bar > %.10g", sb.value);
      return buf;
    case StateBoundKind::kInfeasibleForAll:
      return "infeasible_for_all";
  }
  return "unknown";
}

}  // namespace mracsim
