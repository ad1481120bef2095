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

#include "mracsim/controller.hpp"

#include <cmath>
#include <string>

#include "mracsim/numerics.hpp"

namespace mracsim {

namespace {

double quadratic_form(const Vector& e, const Matrix& p) {
  return dot(e, p * e);
}

double barrier_denominator(const Vector& e, const Matrix& p,
                           double xi_prime) {
  const double xi_p2 = xi_prime * xi_prime;
  const double epe = quadratic_form(e, p);
  if (epe >= xi_p2 * (1.0 - tolerances().barrier_guard))
    throw BarrierBreach("barrier: e'Pe = " + std::to_string(epe) +
                        " against xi'^2 = " + std::to_string(xi_p2));
  return xi_p2 - epe;
}

}  // namespace

Vector auxiliary_control(const ControllerState& state, const Vector& x,
                         const Vector& r) {
  if (state.khat_x.cols() != x.size() || state.khat_r.cols() != r.size() ||
      state.khat_x.rows() != state.khat_r.rows())
    throw DimensionMismatch("auxiliary_control: dimension mismatch");
  Vector v = state.khat_x * x;
  v += state.khat_r * r;
  return v;
}

Vector saturate(const Vector& v, double u_bar) {
  const double norm = v.norm();
  if (norm <= u_bar) return v;
  return v * (u_bar / norm);
}

GainRates blf_raw_rates(const ControllerGains& gains, const Matrix& b,
                        const Vector& e, const Vector& x, const Vector& r,
                        double xi_prime) {
  const double den = barrier_denominator(e, gains.P, xi_prime);
  const Vector btpe = b.transpose() * (gains.P * e);
  GainRates rates;
  rates.khat_x_dot = gains.gamma_x * outer(btpe, x) * (-1.0 / den);
  rates.khat_r_dot = gains.gamma_r * outer(btpe, r) * (-1.0 / den);
  return rates;
}

GainRates classical_raw_rates(const ControllerGains& gains, const Matrix& b,
                              const Vector& e, const Vector& x,
                              const Vector& r) {
  if (b.rows() != e.size() || x.size() != gains.P.rows())
    throw DimensionMismatch("classical_raw_rates: dimension mismatch");
  const Vector btpe = b.transpose() * (gains.P * e);
  GainRates rates;
  rates.khat_x_dot = gains.gamma_x * outer(btpe, x) * -1.0;
  rates.khat_r_dot = gains.gamma_r * outer(btpe, r) * -1.0;
  return rates;
}

Matrix project(const Matrix& theta, const Matrix& raw_rate,
               const ProjectionParams& pp) {
  const double bound2 = pp.bound * pp.bound;
  const double norm2 = frobenius_dot(theta, theta);
  const double f = ((1.0 + pp.epsilon) * norm2 - bound2) /
                   (pp.epsilon * bound2);
  if (f <= 0.0) return raw_rate;

  // grad f = 2 (1+eps) theta / (eps bound^2); only its direction matters.
  const double grad_scale = 2.0 * (1.0 + pp.epsilon) / (pp.epsilon * bound2);
  const double inner = grad_scale * frobenius_dot(theta, raw_rate);
  if (inner <= 0.0) return raw_rate;

  const double grad_norm2 = grad_scale * grad_scale * norm2;
  Matrix out = raw_rate;
  const Matrix grad = theta * grad_scale;
  out -= grad * (f * inner / grad_norm2);
  return out;
}

double blf_value(const Vector& e, const Matrix& p, double xi_prime) {
  const double den = barrier_denominator(e, p, xi_prime);
  return 0.5 * std::log(xi_prime * xi_prime / den);
}

}  // namespace mracsim
