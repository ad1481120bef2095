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

#include <cstdint>
#include <variant>
#include <vector>

#include "mracsim/linalg.hpp"

namespace mracsim {

// Signal primitives. A channel is a sum of primitives; a SignalSpec is a
// list of channels.
struct ConstantTerm {
  double value = 0.0;
};

// amplitude * exp(-t / tau), tau > 0.
struct ExponentialTerm {
  double amplitude = 0.0;
  double tau = 1.0;
};

// amplitude * sin(omega t + phase).
struct SinusoidTerm {
  double amplitude = 0.0;
  double omega = 1.0;
  double phase = 0.0;
};

// amplitude * 1[t >= t_on].
struct StepTerm {
  double amplitude = 0.0;
  double t_on = 0.0;
};

// Deterministic bounded noise: a seeded multisine with |value| <= amplitude.
// The generator is a pure function of (seed, channel, t), so runs are
// reproducible byte for byte.
struct NoiseTerm {
  double amplitude = 0.0;
};

using SignalTerm = std::variant<ConstantTerm, ExponentialTerm, SinusoidTerm,
                                StepTerm, NoiseTerm>;

struct SignalSpec {
  std::vector<std::vector<SignalTerm>> channels;

  std::size_t dim() const { return channels.size(); }
};

struct DisturbanceSpec {
  SignalSpec base;          // n channels
  double onset = 0.0;       // seconds; zero output before this time
  double norm_cap = 0.0;    // d_bar > 0
  std::uint64_t seed = 0;   // for noise primitives
};

// Evaluates the primitive sum per channel. `seed` feeds noise primitives.
Vector eval_signal(const SignalSpec& spec, double t, std::uint64_t seed = 0);

// Reference input r(t); throws DimensionMismatch unless spec.dim() == m.
Vector eval_reference(const SignalSpec& spec, double t, std::size_t m);

// Disturbance d(t): zero before onset, afterwards the base signal rescaled
// by min(1, cap / ||base||) so that ||d(t)|| <= cap for all t.
Vector eval_disturbance(const DisturbanceSpec& spec, double t, std::size_t n);

// Upper bound on sup_t ||signal(t)|| over [0, horizon]: grid maximum times
// 1.001, exact (factor 1.0) when every primitive is a constant or decaying
// exponential and each channel's terms share one sign, in which case the
// norm peaks at t = 0.
double sup_norm_bound(const SignalSpec& spec, double horizon,
                      std::size_t samples, std::uint64_t seed = 0);

}  // namespace mracsim
