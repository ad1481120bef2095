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

#include "mracsim/linalg.hpp"

namespace mracsim {

// xdot = A x + B u + d. A is unknown to the controller but known to the
// simulator; B is known with full column rank; (A, B) stabilizable.
struct PlantModel {
  Matrix A;  // n x n
  Matrix B;  // n x m, n >= m

  std::size_t n() const { return A.rows(); }
  std::size_t m() const { return B.cols(); }
};

// xrdot = A_r x_r + B_r r with Hurwitz A_r.
struct ReferenceModel {
  Matrix A_r;  // n x n
  Matrix B_r;  // n x m
};

// Which threshold gates the auxiliary-reference rescaling.
enum class AuxVariant {
  kPaperThreshold,   // rescale when ||x_r|| >= x_bar (verbatim form)
  kSelfConsistent,   // rescale when ||x_r|| >= xa_bar; guarantees ||x_a|| <= xa_bar
};

// User bounds. xi = x_bar - xa_bar is the error budget; xi' additionally
// weights it by sqrt(lambda_min{P}) once P is known.
struct ConstraintSpec {
  double x_bar = 0.0;   // state bound, ||x|| < x_bar
  double u_bar = 0.0;   // input bound, ||u|| <= u_bar
  double xa_bar = 0.0;  // auxiliary reference bound, xa_bar < x_bar
  double d_bar = 0.0;   // disturbance bound, ||d|| <= d_bar
  double kx_bar = 0.0;  // gain estimate bound for Khat_x
  double kr_bar = 0.0;  // gain estimate bound for Khat_r
  std::optional<double> x0_bar;  // input-only special case: ||x(0)|| < x0_bar
  std::optional<double> xr_bar;  // informational bound on ||x_r||

  double xi() const { return x_bar - xa_bar; }
};

// xi' = xi * sqrt(lambda_min{P}).
double xi_prime(const ConstraintSpec& cs, double lambda_min_p);

// Gains solving the matching conditions, with the residuals they leave.
struct TrueGains {
  Matrix K_x;  // m x n
  Matrix K_r;  // m x m
  double residual_x = 0.0;  // ||A + B K_x - A_r||_F
  double residual_r = 0.0;  // ||B K_r - B_r||_F
};

// Throws InvalidConfig on violated invariants (ranks, PBH, Hurwitz, bounds).
void validate_plant(const PlantModel& plant);
void validate_reference(const ReferenceModel& ref, std::size_t n,
                        std::size_t m);
void validate_constraints(const ConstraintSpec& cs);

// PBH test on the eigenvalues with nonnegative real part.
bool is_stabilizable(const Matrix& a, const Matrix& b);

// A x + B u + d
Vector plant_derivative(const PlantModel& plant, const Vector& x,
                        const Vector& u, const Vector& d);

// A_r x_r + B_r r
Vector reference_derivative(const ReferenceModel& ref, const Vector& x_r,
                            const Vector& r);

// Clipped copy of the reference state (algebraic output, not integrated).
Vector auxiliary_reference(const Vector& x_r, const ConstraintSpec& cs,
                           AuxVariant variant);

// K_x = B+(A_r - A), K_r = B+ B_r; residuals reported, not asserted.
TrueGains compute_true_gains(const PlantModel& plant,
                             const ReferenceModel& ref);

// ||B+|| * ||A_r - A_actual_or_bound|| in spectral norms.
double kx_bound_estimate(const PlantModel& plant, const ReferenceModel& ref,
                         const Matrix& a_actual_or_bound);

}  // namespace mracsim
