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

#include <cstddef>
#include <string>
#include <vector>

#include "mracsim/controller.hpp"
#include "mracsim/models.hpp"
#include "mracsim/signals.hpp"

namespace mracsim {

struct SimConfig {
  PlantModel plant;
  ReferenceModel reference;
  ConstraintSpec constraints;
  Matrix gamma_x;  // m x m SPD
  Matrix gamma_r;  // m x m SPD
  Matrix q;        // n x n SPD
  ControlLaw law = ControlLaw::kBlf;
  AuxVariant aux_variant = AuxVariant::kSelfConsistent;
  double projection_epsilon = 0.1;
  Matrix khat_x0;  // empty -> zero matrix
  Matrix khat_r0;  // empty -> zero matrix
  SignalSpec reference_signal;
  DisturbanceSpec disturbance;
  Vector x0;
  Vector xr0;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t log_stride = 1;
  bool override_feasibility = false;
};

struct LogRecord {
  double t = 0.0;
  Vector x;
  Vector x_r;
  Vector x_a;
  Vector u;
  Vector d;
  double v_norm = 0.0;
  double delta_u_norm = 0.0;  // ||u - v||
  double e_norm = 0.0;        // e = x - x_a
  double eTPe = 0.0;
  double blf_v1 = 0.0;        // +inf once the barrier is unusable
  double khat_x_fro = 0.0;
  double khat_r_fro = 0.0;
  bool clamp_triggered = false;
};

struct SummaryMetrics {
  double max_x_norm = 0.0;
  double max_u_norm = 0.0;
  double max_v_norm = 0.0;
  double max_e_norm = 0.0;
  double max_eTPe_over_xiprime2 = 0.0;
  bool state_constraint_ok = true;   // max ||x|| < x_bar
  bool input_constraint_ok = true;   // max ||u|| <= u_bar + 1e-12
  bool omega_e_ok = true;            // max e'Pe < xi'^2
  double final_e_norm = 0.0;
  double saturation_fraction = 0.0;  // steps with ||v|| > u_bar
  std::size_t clamp_count = 0;
};

struct Trajectory {
  std::vector<LogRecord> records;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
};

enum class RunStatus { kOk, kBarrierAbort };

struct RunResult {
  Trajectory trajectory;
  SummaryMetrics metrics;
  RunStatus status = RunStatus::kOk;
  // Derived quantities, reported for downstream artifacts.
  Matrix p;
  double lambda_min_p = 0.0;
  double xi_prime = 0.0;
  double r_bar = 0.0;
};

// packed = [x; x_r; vec(Khat_x); vec(Khat_r)], gain matrices flattened
// column-major.
Vector pack_state(const Vector& x, const Vector& x_r, const Matrix& khat_x,
                  const Matrix& khat_r);
void unpack_state(const Vector& packed, std::size_t n, std::size_t m,
                  Vector* x, Vector* x_r, Matrix* khat_x, Matrix* khat_r);

// Right-hand side of the closed loop: x_a algebraic, v, u = saturate(v),
// disturbance, projected adaptation rates, then the stacked derivatives.
Vector closed_loop_derivative(const SimConfig& cfg, const Matrix& p,
                              double xi_p, double t, const Vector& packed);

// Fixed-step RK4 run with barrier-triggered step halving (at most 10
// halvings per grid step, then abort with the partial trajectory).
RunResult run_scenario(const SimConfig& cfg);

// Metrics recomputed from logged records only.
SummaryMetrics compute_metrics(const Trajectory& traj,
                               const ConstraintSpec& cs, const Matrix& p);

// Number of samples used when bounding r_bar over the run horizon.
inline constexpr std::size_t kSupNormSamples = 4001;

}  // namespace mracsim
