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

#include "mracsim/linalg.hpp"

namespace mracsim {

enum class ControlLaw { kBlf, kClassical };

// Adaptive gain estimates; Frobenius norms stay within kx_bar/kr_bar (plus
// the projection slack) at every accepted integrator step.
struct ControllerState {
  Matrix khat_x;  // m x n
  Matrix khat_r;  // m x m
};

struct ControllerGains {
  Matrix gamma_x;  // m x m SPD
  Matrix gamma_r;  // m x m SPD
  Matrix Q;        // n x n SPD
  Matrix P;        // n x n SPD, solves A_r'P + P A_r + Q = 0
  ControlLaw law = ControlLaw::kBlf;
};

struct ProjectionParams {
  double bound = 1.0;     // Frobenius radius (kx_bar or kr_bar)
  double epsilon = 0.1;   // smoothing band width, in (0, 1)
};

struct GainRates {
  Matrix khat_x_dot;  // m x n
  Matrix khat_r_dot;  // m x m
};

// v = Khat_x x + Khat_r r
Vector auxiliary_control(const ControllerState& state, const Vector& x,
                         const Vector& r);

// Radial rescale onto the ||u|| <= u_bar ball; identity inside it.
Vector saturate(const Vector& v, double u_bar);

// Barrier-modified raw adaptation rates:
//   -Gamma B'P e x' / (xi'^2 - e'Pe)  and  -Gamma B'P e r' / (same).
// Throws BarrierBreach when the denominator is numerically unusable.
GainRates blf_raw_rates(const ControllerGains& gains, const Matrix& b,
                        const Vector& e, const Vector& x, const Vector& r,
                        double xi_prime);

// The same rates without the barrier denominator (robust-MRAC baseline).
GainRates classical_raw_rates(const ControllerGains& gains, const Matrix& b,
                              const Vector& e, const Vector& x,
                              const Vector& r);

// Smooth projection with f(theta) = ((1+eps)||theta||_F^2 - bound^2) /
// (eps bound^2): passes the rate through when f <= 0 or it points inward,
// otherwise removes the scaled outward-normal component. Keeps
// {||theta||_F <= bound} forward-invariant under continuous integration.
Matrix project(const Matrix& theta, const Matrix& raw_rate,
               const ProjectionParams& pp);

// Runtime monitor 0.5 log(xi'^2 / (xi'^2 - e'Pe)); throws BarrierBreach at
// the boundary.
double blf_value(const Vector& e, const Matrix& p, double xi_prime);

}  // namespace mracsim
