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

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "mracsim/linalg.hpp"

namespace mracsim {

// Every tolerance used by the numeric kernels lives here so tests can
// reference the same constants.
struct NumericTolerances {
  // Lyapunov residual bound: ||Ar'P + PAr + Q||_F <= rel * (1 + ||Q||_F).
  double lyapunov_residual_rel = 1e-9;
  // Maximum asymmetry accepted by eig_sym_extremes.
  double symmetry_abs = 1e-9;
  // Cyclic Jacobi sweep termination (off-diagonal norm relative to ||M||_F).
  double jacobi_off_rel = 1e-12;
  int jacobi_max_sweeps = 100;
  // A_r is Hurwitz when every eigenvalue real part < hurwitz_margin.
  double hurwitz_margin = -1e-12;
  // Smallest/largest singular value ratio accepted by left_pseudo_inverse.
  double pinv_rank_rel = 1e-10;
  // Barrier denominator guard: breach when e'Pe >= xi'^2 * (1 - guard).
  double barrier_guard = 1e-9;
  // Allowed projection overshoot of the Frobenius gain bounds.
  double projection_slack = 1e-6;
  // Matching-condition residual above which a warning is surfaced.
  double matching_warn = 1e-6;
};

inline const NumericTolerances& tolerances() {
  static const NumericTolerances tol{};
  return tol;
}

// All eigenvalues of a symmetric matrix by cyclic Jacobi iteration,
// ascending. Throws NotSymmetric when asymmetry exceeds tolerance.
std::vector<double> eig_sym(const Matrix& m);

// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> eig_sym_extremes(const Matrix& m);

// Largest singular value, computed via eig_sym_extremes of M'M.
double spectral_norm(const Matrix& m);

// B+ = (B'B)^-1 B' for full-column-rank B. Throws RankDeficient.
Matrix left_pseudo_inverse(const Matrix& b);

// Eigenvalues of a general real square matrix: Householder reduction to
// Hessenberg form followed by Francis double-shift QR iteration.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// True when every eigenvalue real part is below tolerances().hurwitz_margin.
bool is_hurwitz(const Matrix& a);

// Solves Ar'P + PAr + Q = 0 by Kronecker vectorization. Requires Q
// symmetric positive definite and Ar Hurwitz; the returned P is
// symmetrized and verified against the residual bound.
Matrix solve_lyapunov(const Matrix& a_r, const Matrix& q);

using DerivativeFn = std::function<Vector(double, const Vector&)>;

// One classical fourth-order Runge-Kutta step. Throws NonFiniteDerivative
// naming the stage that produced a non-finite value.
Vector rk4_step(const DerivativeFn& f, double t, const Vector& y, double h);

}  // namespace mracsim
