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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mracsim/sim_engine.hpp"

namespace mracsim {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

// A parsed configuration file: the scenario plus the optional robust-MRAC
// baseline gains used when the classical law runs.
struct ToolkitConfig {
  SimConfig sim;
  std::optional<Matrix> classical_gamma_x;
  std::optional<Matrix> classical_gamma_r;
  std::string notes;
};

// Parse/serialize. Parsing throws InvalidConfig with a field path in the
// message; validation of model invariants happens separately.
ToolkitConfig parse_config(const nlohmann::json& j);
ToolkitConfig load_config_file(const std::filesystem::path& path);
nlohmann::json config_to_json(const ToolkitConfig& cfg);

// The scenario with the law forced and, for the classical law, the
// baseline gamma matrices substituted when present.
SimConfig resolve_for_law(const ToolkitConfig& cfg, ControlLaw law);

// FNV-1a 64-bit digest of the raw file bytes, as a hex string.
std::string fnv1a64_hex(std::string_view bytes);

std::string to_string(ControlLaw law);
std::string to_string(AuxVariant variant);

}  // namespace mracsim
