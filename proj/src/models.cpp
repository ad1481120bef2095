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

#include "mracsim/models.hpp"

#include <cmath>
#include <string>

#include "mracsim/numerics.hpp"

namespace mracsim {

namespace {

// Smallest singular value of the complex matrix M = Mr + i Mi via its real
// embedding [[Mr, -Mi], [Mi, Mr]], whose singular values are those of M
// doubled in multiplicity.
double smin_complex(const Matrix& mr, const Matrix& mi) {
  const std::size_t r = mr.rows(), c = mr.cols();
  Matrix e(2 * r, 2 * c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      e(i, j) = mr(i, j);
      e(i, j + c) = -mi(i, j);
      e(i + r, j) = mi(i, j);
      e(i + r, j + c) = mr(i, j);
    }
  }
  // Wide matrix: rank over rows, so use the row Gram matrix E E'.
  const Matrix eet = e * e.transpose();
  return std::sqrt(std::max(0.0, eig_sym_extremes(eet).first));
}

}  // namespace

double xi_prime(const ConstraintSpec& cs, double lambda_min_p) {
  return cs.xi() * std::sqrt(lambda_min_p);
}

bool is_stabilizable(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  const auto ev = eigenvalues(a);
  for (const auto& lambda : ev) {
    if (lambda.real() < -1e-9) continue;  // stable modes need no control
    // rank [A - lambda I, B] must be n; test via smallest singular value.
    Matrix mr(n, n + b.cols());
    Matrix mi(n, n + b.cols());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        mr(i, j) = a(i, j) - (i == j ? lambda.real() : 0.0);
        mi(i, j) = i == j ? -lambda.imag() : 0.0;
      }
      for (std::size_t j = 0; j < b.cols(); ++j) mr(i, n + j) = b(i, j);
    }
    const double smin = smin_complex(mr, mi);
    const double scale = std::max(1.0, a.max_abs() + b.max_abs());
    if (smin <= 1e-8 * scale) return false;
  }
  return true;
}

void validate_plant(const PlantModel& plant) {
  const std::size_t n = plant.A.rows();
  if (plant.A.cols() != n) throw InvalidConfig("plant.A must be square");
  if (plant.B.rows() != n)
    throw InvalidConfig("plant.B row count must match plant.A");
  if (plant.B.cols() > n)
    throw InvalidConfig("plant.B must have at most n columns (n >= m)");
  if (!plant.A.is_finite() || !plant.B.is_finite())
    throw InvalidConfig("plant matrices must be finite");
  try {
    left_pseudo_inverse(plant.B);
  } catch (const RankDeficient&) {
    throw InvalidConfig("plant.B must have full column rank");
  }
  if (!is_stabilizable(plant.A, plant.B))
    throw InvalidConfig("(A, B) fails the PBH stabilizability test");
}

void validate_reference(const ReferenceModel& ref, std::size_t n,
                        std::size_t m) {
  if (ref.A_r.rows() != n || ref.A_r.cols() != n)
    throw InvalidConfig("reference.A_r must be n x n");
  if (ref.B_r.rows() != n || ref.B_r.cols() != m)
    throw InvalidConfig("reference.B_r must be n x m");
  if (!ref.A_r.is_finite() || !ref.B_r.is_finite())
    throw InvalidConfig("reference matrices must be finite");
  if (!is_hurwitz(ref.A_r))
    throw InvalidConfig("reference.A_r must be Hurwitz");
}

void validate_constraints(const ConstraintSpec& cs) {
  if (!(cs.x_bar > 0.0)) throw InvalidConfig("constraints.x_bar must be > 0");
  if (!(cs.u_bar > 0.0)) throw InvalidConfig("constraints.u_bar must be > 0");
  if (!(cs.xa_bar > 0.0))
    throw InvalidConfig("constraints.xa_bar must be > 0");
  if (!(cs.d_bar >= 0.0))
    throw InvalidConfig("constraints.d_bar must be >= 0");
  if (!(cs.kx_bar > 0.0))
    throw InvalidConfig("constraints.kx_bar must be > 0");
  if (!(cs.kr_bar > 0.0))
    throw InvalidConfig("constraints.kr_bar must be > 0");
  if (!(cs.xa_bar < cs.x_bar))
    throw InvalidConfig("constraints require xa_bar < x_bar (xi > 0)");
  if (cs.x0_bar && !(*cs.x0_bar > 0.0))
    throw InvalidConfig("constraints.x0_bar must be > 0 when given");
  if (cs.xr_bar && !(*cs.xr_bar > 0.0))
    throw InvalidConfig("constraints.xr_bar must be > 0 when given");
}

Vector plant_derivative(const PlantModel& plant, const Vector& x,
                        const Vector& u, const Vector& d) {
  if (x.size() != plant.n() || u.size() != plant.m() || d.size() != plant.n())
    throw DimensionMismatch("plant_derivative: dimension mismatch");
  Vector dx = plant.A * x;
  dx += plant.B * u;
  dx += d;
  return dx;
}

Vector reference_derivative(const ReferenceModel& ref, const Vector& x_r,
                            const Vector& r) {
  if (x_r.size() != ref.A_r.rows() || r.size() != ref.B_r.cols())
    throw DimensionMismatch("reference_derivative: dimension mismatch");
  Vector dx = ref.A_r * x_r;
  dx += ref.B_r * r;
  return dx;
}

Vector auxiliary_reference(const Vector& x_r, const ConstraintSpec& cs,
                           AuxVariant variant) {
  const double threshold =
      variant == AuxVariant::kPaperThreshold ? cs.x_bar : cs.xa_bar;
  const double norm = x_r.norm();
  if (norm < threshold) return x_r;
  return x_r * (cs.xa_bar / norm);
}

TrueGains compute_true_gains(const PlantModel& plant,
                             const ReferenceModel& ref) {
  const Matrix b_dagger = left_pseudo_inverse(plant.B);
  TrueGains g;
  g.K_x = b_dagger * (ref.A_r - plant.A);
  g.K_r = b_dagger * ref.B_r;
  g.residual_x = (plant.A + plant.B * g.K_x - ref.A_r).frobenius_norm();
  g.residual_r = (plant.B * g.K_r - ref.B_r).frobenius_norm();
  return g;
}

double kx_bound_estimate(const PlantModel& plant, const ReferenceModel& ref,
                         const Matrix& a_actual_or_bound) {
  const Matrix b_dagger = left_pseudo_inverse(plant.B);
  return spectral_norm(b_dagger) *
         spectral_norm(ref.A_r - a_actual_or_bound);
}

}  // namespace mracsim
