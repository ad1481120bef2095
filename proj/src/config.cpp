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

#include "mracsim/config.hpp"

#include <fstream>
#include <sstream>

namespace mracsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw InvalidConfig("config field '" + path + "': " + msg);
}

const json& get(const json& j, const std::string& key,
                const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    fail(path + "." + key, "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double get_number(const json& j, const std::string& key,
                  const std::string& path) {
  return as_number(get(j, key, path), path + "." + key);
}

std::size_t get_count(const json& j, const std::string& key,
                      const std::string& path) {
  const json& v = get(j, key, path);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    fail(path + "." + key, "expected a nonnegative integer");
  const auto n = v.get<long long>();
  if (n < 0) fail(path + "." + key, "expected a nonnegative integer");
  return static_cast<std::size_t>(n);
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    fail(path, "expected a nested array of numbers");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.size() != cols)
      fail(path, "rows must all have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = as_number(row.at(c), path);
  }
  return m;
}

// Accepts either a nested array or a scalar c meaning c * I_dim.
Matrix as_matrix_or_scaled_identity(const json& j, std::size_t dim,
                                    const std::string& path) {
  if (j.is_number()) return Matrix::identity(dim) * j.get<double>();
  return as_matrix(j, path);
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = as_number(j.at(i), path);
  return v;
}

SignalTerm parse_term(const json& j, const std::string& path) {
  const std::string kind = get(j, "kind", path).get<std::string>();
  if (kind == "constant") return ConstantTerm{get_number(j, "value", path)};
  if (kind == "exponential") {
    ExponentialTerm t{get_number(j, "amplitude", path),
                      get_number(j, "tau", path)};
    if (!(t.tau > 0.0)) fail(path + ".tau", "must be > 0");
    return t;
  }
  if (kind == "sinusoid")
    return SinusoidTerm{get_number(j, "amplitude", path),
                        get_number(j, "omega", path),
                        j.contains("phase") ? get_number(j, "phase", path)
                                            : 0.0};
  if (kind == "step")
    return StepTerm{get_number(j, "amplitude", path),
                    get_number(j, "t_on", path)};
  if (kind == "noise") return NoiseTerm{get_number(j, "amplitude", path)};
  fail(path + ".kind", "unknown primitive '" + kind + "'");
}

SignalSpec parse_signal(const json& j, const std::string& path) {
  SignalSpec spec;
  const json& channels = get(j, "channels", path);
  if (!channels.is_array()) fail(path + ".channels", "expected an array");
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const json& terms = channels.at(ch);
    if (!terms.is_array())
      fail(path + ".channels[" + std::to_string(ch) + "]",
           "expected an array of primitives");
    std::vector<SignalTerm> parsed;
    for (std::size_t k = 0; k < terms.size(); ++k)
      parsed.push_back(parse_term(
          terms.at(k),
          path + ".channels[" + std::to_string(ch) + "][" +
              std::to_string(k) + "]"));
    spec.channels.push_back(std::move(parsed));
  }
  return spec;
}

json term_to_json(const SignalTerm& term) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantTerm>) {
          return {{"kind", "constant"}, {"value", p.value}};
        } else if constexpr (std::is_same_v<T, ExponentialTerm>) {
          return {{"kind", "exponential"},
                  {"amplitude", p.amplitude},
                  {"tau", p.tau}};
        } else if constexpr (std::is_same_v<T, SinusoidTerm>) {
          return {{"kind", "sinusoid"},
                  {"amplitude", p.amplitude},
                  {"omega", p.omega},
                  {"phase", p.phase}};
        } else if constexpr (std::is_same_v<T, StepTerm>) {
          return {{"kind", "step"}, {"amplitude", p.amplitude},
                  {"t_on", p.t_on}};
        } else {
          return {{"kind", "noise"}, {"amplitude", p.amplitude}};
        }
      },
      term);
}

json signal_to_json(const SignalSpec& spec) {
  json channels = json::array();
  for (const auto& ch : spec.channels) {
    json terms = json::array();
    for (const auto& t : ch) terms.push_back(term_to_json(t));
    channels.push_back(std::move(terms));
  }
  return {{"channels", std::move(channels)}};
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

ToolkitConfig parse_config(const json& j) {
  ToolkitConfig cfg;
  SimConfig& sim = cfg.sim;

  const json& plant = get(j, "plant", "");
  sim.plant.A = as_matrix(get(plant, "A", "plant"), "plant.A");
  sim.plant.B = as_matrix(get(plant, "B", "plant"), "plant.B");
  const std::size_t n = sim.plant.A.rows();
  const std::size_t m = sim.plant.B.cols();

  const json& ref = get(j, "reference", "");
  sim.reference.A_r = as_matrix(get(ref, "A_r", "reference"), "reference.A_r");
  sim.reference.B_r = as_matrix(get(ref, "B_r", "reference"), "reference.B_r");

  const json& cons = get(j, "constraints", "");
  sim.constraints.x_bar = get_number(cons, "x_bar", "constraints");
  sim.constraints.u_bar = get_number(cons, "u_bar", "constraints");
  sim.constraints.xa_bar = get_number(cons, "xa_bar", "constraints");
  sim.constraints.d_bar = get_number(cons, "d_bar", "constraints");
  sim.constraints.kx_bar = get_number(cons, "kx_bar", "constraints");
  sim.constraints.kr_bar = get_number(cons, "kr_bar", "constraints");
  if (cons.contains("x0_bar"))
    sim.constraints.x0_bar = get_number(cons, "x0_bar", "constraints");
  if (cons.contains("xr_bar"))
    sim.constraints.xr_bar = get_number(cons, "xr_bar", "constraints");

  const json& gains = get(j, "gains", "");
  sim.q = as_matrix_or_scaled_identity(get(gains, "Q", "gains"), n, "gains.Q");
  sim.gamma_x = as_matrix_or_scaled_identity(get(gains, "gamma_x", "gains"),
                                             m, "gains.gamma_x");
  sim.gamma_r = as_matrix_or_scaled_identity(get(gains, "gamma_r", "gains"),
                                             m, "gains.gamma_r");
  if (gains.contains("classical_gamma_x"))
    cfg.classical_gamma_x = as_matrix_or_scaled_identity(
        gains.at("classical_gamma_x"), m, "gains.classical_gamma_x");
  if (gains.contains("classical_gamma_r"))
    cfg.classical_gamma_r = as_matrix_or_scaled_identity(
        gains.at("classical_gamma_r"), m, "gains.classical_gamma_r");

  const json& ctl = get(j, "controller", "");
  const std::string law = get(ctl, "law", "controller").get<std::string>();
  if (law == "blf")
    sim.law = ControlLaw::kBlf;
  else if (law == "classical")
    sim.law = ControlLaw::kClassical;
  else
    fail("controller.law", "expected 'blf' or 'classical'");
  const std::string aux =
      get(ctl, "aux_variant", "controller").get<std::string>();
  if (aux == "self_consistent")
    sim.aux_variant = AuxVariant::kSelfConsistent;
  else if (aux == "paper_threshold")
    sim.aux_variant = AuxVariant::kPaperThreshold;
  else
    fail("controller.aux_variant",
         "expected 'self_consistent' or 'paper_threshold'");
  sim.projection_epsilon =
      ctl.contains("projection_epsilon")
          ? get_number(ctl, "projection_epsilon", "controller")
          : 0.1;
  if (ctl.contains("khat_x0"))
    sim.khat_x0 = as_matrix(ctl.at("khat_x0"), "controller.khat_x0");
  if (ctl.contains("khat_r0"))
    sim.khat_r0 = as_matrix(ctl.at("khat_r0"), "controller.khat_r0");

  const json& signals = get(j, "signals", "");
  sim.reference_signal =
      parse_signal(get(signals, "reference", "signals"), "signals.reference");
  const json& dist = get(signals, "disturbance", "signals");
  sim.disturbance.base = parse_signal(dist, "signals.disturbance");
  sim.disturbance.onset = get_number(dist, "onset", "signals.disturbance");
  sim.disturbance.norm_cap = get_number(dist, "cap", "signals.disturbance");
  sim.disturbance.seed =
      dist.contains("seed")
          ? static_cast<std::uint64_t>(get_count(dist, "seed",
                                                 "signals.disturbance"))
          : 0;

  const json& sj = get(j, "sim", "");
  sim.x0 = as_vector(get(sj, "x0", "sim"), "sim.x0");
  sim.xr0 = as_vector(get(sj, "xr0", "sim"), "sim.xr0");
  sim.t_end = get_number(sj, "t_end", "sim");
  sim.dt = get_number(sj, "dt", "sim");
  sim.log_stride = sj.contains("log_stride")
                       ? get_count(sj, "log_stride", "sim")
                       : 1;

  if (j.contains("notes") && j.at("notes").is_string())
    cfg.notes = j.at("notes").get<std::string>();
  return cfg;
}

ToolkitConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw InvalidConfig("config parse error in " + path.string() + ": " +
                        err.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ToolkitConfig& cfg) {
  const SimConfig& sim = cfg.sim;
  json j;
  j["plant"] = {{"A", matrix_to_json(sim.plant.A)},
                {"B", matrix_to_json(sim.plant.B)}};
  j["reference"] = {{"A_r", matrix_to_json(sim.reference.A_r)},
                    {"B_r", matrix_to_json(sim.reference.B_r)}};
  json cons = {{"x_bar", sim.constraints.x_bar},
               {"u_bar", sim.constraints.u_bar},
               {"xa_bar", sim.constraints.xa_bar},
               {"d_bar", sim.constraints.d_bar},
               {"kx_bar", sim.constraints.kx_bar},
               {"kr_bar", sim.constraints.kr_bar}};
  if (sim.constraints.x0_bar) cons["x0_bar"] = *sim.constraints.x0_bar;
  if (sim.constraints.xr_bar) cons["xr_bar"] = *sim.constraints.xr_bar;
  j["constraints"] = std::move(cons);
  json gains = {{"Q", matrix_to_json(sim.q)},
                {"gamma_x", matrix_to_json(sim.gamma_x)},
                {"gamma_r", matrix_to_json(sim.gamma_r)}};
  if (cfg.classical_gamma_x)
    gains["classical_gamma_x"] = matrix_to_json(*cfg.classical_gamma_x);
  if (cfg.classical_gamma_r)
    gains["classical_gamma_r"] = matrix_to_json(*cfg.classical_gamma_r);
  j["gains"] = std::move(gains);
  json ctl = {{"law", to_string(sim.law)},
              {"aux_variant", to_string(sim.aux_variant)},
              {"projection_epsilon", sim.projection_epsilon}};
  if (!sim.khat_x0.empty()) ctl["khat_x0"] = matrix_to_json(sim.khat_x0);
  if (!sim.khat_r0.empty()) ctl["khat_r0"] = matrix_to_json(sim.khat_r0);
  j["controller"] = std::move(ctl);
  json dist = signal_to_json(sim.disturbance.base);
  dist["onset"] = sim.disturbance.onset;
  dist["cap"] = sim.disturbance.norm_cap;
  dist["seed"] = sim.disturbance.seed;
  j["signals"] = {{"reference", signal_to_json(sim.reference_signal)},
                  {"disturbance", std::move(dist)}};
  j["sim"] = {{"x0", vector_to_json(sim.x0)},
              {"xr0", vector_to_json(sim.xr0)},
              {"t_end", sim.t_end},
              {"dt", sim.dt},
              {"log_stride", sim.log_stride}};
  if (!cfg.notes.empty()) j["notes"] = cfg.notes;
  return j;
}

SimConfig resolve_for_law(const ToolkitConfig& cfg, ControlLaw law) {
  SimConfig sim = cfg.sim;
  sim.law = law;
  if (law == ControlLaw::kClassical) {
    if (cfg.classical_gamma_x) sim.gamma_x = *cfg.classical_gamma_x;
    if (cfg.classical_gamma_r) sim.gamma_r = *cfg.classical_gamma_r;
  }
  return sim;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(ControlLaw law) {
  return law == ControlLaw::kBlf ? "blf" : "classical";
}

std::string to_string(AuxVariant variant) {
  return variant == AuxVariant::kSelfConsistent ? "self_consistent"
                                                : "paper_threshold";
}

}  // namespace mracsim
