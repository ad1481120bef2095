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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mracsim/linalg.hpp"
#include "mracsim/models.hpp"

namespace mracsim {

enum class FeasibilityCase {
  kCase21,             // sigma > 0
  kCase22VarrhoNonneg,  // sigma <= 0, varrho >= 0
  kCase22VarrhoNeg,     // sigma <= 0, varrho < 0
};

// Admissible state-bound description for a fixed input bound.
enum class StateBoundKind {
  kBounded,           // xa_bar < x_bar < value
  kUnbounded,         // every x_bar > xa_bar is admissible
  kLowerBounded,      // alpha < 0 with u_bar <= alpha xa_bar + beta:
                      // admissible only for x_bar > value
  kInfeasibleForAll,  // no admissible x_bar
};

struct StateBound {
  StateBoundKind kind = StateBoundKind::kInfeasibleForAll;
  double value = 0.0;  // threshold for kBounded / kLowerBounded

  bool admits(double x_bar) const {
    switch (kind) {
      case StateBoundKind::kBounded:
        return x_bar < value;
      case StateBoundKind::kUnbounded:
        return true;
      case StateBoundKind::kLowerBounded:
        return x_bar > value;
      case StateBoundKind::kInfeasibleForAll:
        return false;
    }
    return false;
  }
};

struct FeasibilityReport {
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double sigma = 0.0;   // kx_bar / eta - 1
  double varrho = 0.0;  // u_bar - kx_bar xa_bar - kr_bar r_bar - d_bar/||B||
  bool c1_satisfied = false;
  double c1_margin = 0.0;  // u_bar - (alpha x_bar + beta)
  FeasibilityCase case_label = FeasibilityCase::kCase21;
  double min_u_bar = 0.0;
  StateBound max_x_bar;

  // Inputs and diagnostics carried along for reporting.
  double r_bar = 0.0;
  double b_norm = 0.0;
  double lambda_min_q = 0.0;
  double lambda_max_p = 0.0;
  double lambda_min_p = 0.0;
  double xi = 0.0;
  double xi_prime = 0.0;
  bool state_only_satisfied = false;
  double state_only_threshold = 0.0;
  std::optional<double> input_only_min_u;  // present when x0_bar is given
};

struct RegionGrid {
  std::vector<double> u_axis;
  std::vector<double> x_axis;
  std::vector<std::vector<bool>> feasible;  // [u index][x index]
  double alpha = 0.0;
  double beta = 0.0;
};

// eta = lambda_min{Q} / (2 lambda_max{P} ||B||).
double compute_eta(const Matrix& q, const Matrix& p, const Matrix& b);

// alpha = kx_bar - eta; beta = kr_bar r_bar + d_bar/||B|| + xa_bar eta.
std::pair<double, double> compute_alpha_beta(const ConstraintSpec& cs,
                                             double eta, double r_bar,
                                             double b_norm);

// (feasible, margin) with margin = u_bar - (alpha x_bar + beta); the
// inequality is strict, so boundary points are infeasible.
std::pair<bool, double> check_c1(double u_bar, double x_bar, double alpha,
                                 double beta);

// Open lower bound on the input constraint: alpha x_bar + beta.
double min_input_bound(double x_bar, double alpha, double beta);

// Admissible-state-bound classification for a fixed u_bar.
StateBound max_state_bound(double u_bar, double alpha, double beta,
                           double xa_bar);

// State-only special case: threshold = xa_bar + 2 lambda_max{P} d_bar /
// lambda_min{Q}; satisfied iff x_bar > threshold.
std::pair<bool, double> state_only_condition(const ConstraintSpec& cs,
                                             const Matrix& p,
                                             const Matrix& q);

// Input-only special case bound kx_bar x0_bar + kr_bar r_bar + d_bar/||B||.
// Throws MissingX0 when cs.x0_bar is absent.
double input_only_bound(const ConstraintSpec& cs, double r_bar,
                        double b_norm);

RegionGrid build_region_grid(std::pair<double, double> u_range,
                             std::pair<double, double> x_range, double alpha,
                             double beta, std::size_t resolution);

// Full report for one configuration.
FeasibilityReport assess_feasibility(const ConstraintSpec& cs,
                                     const Matrix& q, const Matrix& p,
                                     const Matrix& b, double r_bar);

std::string to_string(FeasibilityCase c);
std::string to_string(const StateBound& sb);

}  // namespace mracsim
