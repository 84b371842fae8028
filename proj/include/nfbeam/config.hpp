// SPDX-License-Identifier: Apache-2.0
//
// JSON experiment configuration. Every key is optional; missing keys keep
// the defaults of ExperimentConfig. Overrides use dotted paths, e.g.
// "array.num_antennas=128" or "noise.sigma_e2=1e-6".

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nfbeam/experiment.hpp"

namespace nfbeam {

nlohmann::json config_to_json(const ExperimentConfig& config);

/// Throws ConfigError naming the first invalid field.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Applies "dotted.key=value". The value is parsed as JSON when possible,
/// otherwise taken as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Reads `path` (empty = defaults only), applies overrides, validates.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace nfbeam
