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

#include "mracsim/signals.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mracsim {

namespace {

constexpr int kNoiseComponents = 8;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
}

// Multisine with hash-derived frequencies in [0.3, 3.0] rad/s and phases in
// [0, 2pi). Component amplitudes sum to `amplitude`, so |value| <= amplitude.
double eval_noise(double amplitude, double t, std::uint64_t seed,
                  std::size_t channel) {
  double v = 0.0;
  const double a = amplitude / kNoiseComponents;
  for (int k = 0; k < kNoiseComponents; ++k) {
    const std::uint64_t h =
        splitmix64(seed ^ splitmix64(channel * 0x100 + static_cast<std::uint64_t>(k)));
    const double omega = 0.3 + 2.7 * unit_from_hash(h);
    const double phase =
        2.0 * std::numbers::pi * unit_from_hash(splitmix64(h + 1));
    v += a * std::sin(omega * t + phase);
  }
  return v;
}

double eval_term(const SignalTerm& term, double t, std::uint64_t seed,
                 std::size_t channel) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantTerm>) {
          return p.value;
        } else if constexpr (std::is_same_v<T, ExponentialTerm>) {
          return p.amplitude * std::exp(-t / p.tau);
        } else if constexpr (std::is_same_v<T, SinusoidTerm>) {
          return p.amplitude * std::sin(p.omega * t + p.phase);
        } else if constexpr (std::is_same_v<T, StepTerm>) {
          return t >= p.t_on ? p.amplitude : 0.0;
        } else {
          return eval_noise(p.amplitude, t, seed, channel);
        }
      },
      term);
}

}  // namespace

Vector eval_signal(const SignalSpec& spec, double t, std::uint64_t seed) {
  Vector out(spec.dim());
  for (std::size_t ch = 0; ch < spec.channels.size(); ++ch) {
    double v = 0.0;
    for (const SignalTerm& term : spec.channels[ch])
      v += eval_term(term, t, seed, ch);
    out[ch] = v;
  }
  return out;
}

Vector eval_reference(const SignalSpec& spec, double t, std::size_t m) {
  if (spec.dim() != m)
    throw DimensionMismatch("eval_reference: spec has " +
                            std::to_string(spec.dim()) +
                            " channels, expected " + std::to_string(m));
  return eval_signal(spec, t);
}

Vector eval_disturbance(const DisturbanceSpec& spec, double t, std::size_t n) {
  if (spec.base.dim() != n)
    throw DimensionMismatch("eval_disturbance: spec has " +
                            std::to_string(spec.base.dim()) +
                            " channels, expected " + std::to_string(n));
  if (t < spec.onset) return Vector(n);
  Vector d = eval_signal(spec.base, t, spec.seed);
  const double norm = d.norm();
  if (norm > spec.norm_cap && norm > 0.0) d *= spec.norm_cap / norm;
  return d;
}

double sup_norm_bound(const SignalSpec& spec, double horizon,
                      std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw Error("sup_norm_bound: samples must be >= 2");

  // Exactness condition: only constants and decaying exponentials, and all
  // terms of a channel share one sign, so each |channel| decays from t = 0.
  bool exact = true;
  for (const auto& channel : spec.channels) {
    double sign = 0.0;
    for (const SignalTerm& term : channel) {
      double coeff = 0.0;
      if (const auto* c = std::get_if<ConstantTerm>(&term)) {
        coeff = c->value;
      } else if (const auto* e = std::get_if<ExponentialTerm>(&term)) {
        if (!(e->tau > 0.0)) exact = false;
        coeff = e->amplitude;
      } else {
        exact = false;
      }
      if (coeff != 0.0) {
        if (sign == 0.0)
          sign = coeff > 0.0 ? 1.0 : -1.0;
        else if (sign * coeff < 0.0)
          exact = false;
      }
      if (!exact) break;
    }
    if (!exact) break;
  }
  if (exact) return eval_signal(spec, 0.0, seed).norm();

  double peak = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = horizon * static_cast<double>(i) /
                     static_cast<double>(samples - 1);
    peak = std::max(peak, eval_signal(spec, t, seed).norm());
  }
  return peak * 1.001;
}

}  // namespace mracsim
