// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/config.hpp"

#include <fstream>

namespace nfbeam {

using nlohmann::json;

namespace {

json adam_axis_json(const AdamAxis& a) {
  return {{"alpha", a.alpha}, {"zeta", a.zeta}, {"varpi", a.varpi}, {"gamma_stop", a.gamma_stop}};
}

json state_json(const MotionState& s) {
  return {{"x", s.x}, {"y", s.y}, {"vx", s.vx}, {"vy", s.vy}};
}

const char* projection_name(Projection p) {
  return p == Projection::Absolute ? "absolute" : "signed";
}

// Rejects keys that do not exist in the reference (defaults) document.
void check_known_keys(const json& doc, const json& reference, const std::string& prefix) {
  if (!doc.is_object()) return;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!reference.contains(key)) throw ConfigError(path, "unknown key");
    if (reference.at(key).is_object()) {
      if (!value.is_object()) throw ConfigError(path, "expected an object");
      check_known_keys(value, reference.at(key), path);
    }
  }
}

template <typename T>
T get(const json& doc, const std::string& dotted) {
  const json* node = &doc;
  size_t start = 0;
  while (true) {
    const size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? dotted.npos : dot - start);
    node = &node->at(key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  try {
    return node->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(dotted, std::string("wrong type: ") + e.what());
  }
}

MotionState get_state(const json& doc, const std::string& key) {
  return {get<double>(doc, key + ".x"), get<double>(doc, key + ".y"),
          get<double>(doc, key + ".vx"), get<double>(doc, key + ".vy")};
}

AdamAxis get_axis(const json& doc, const std::string& key) {
  return {get<double>(doc, key + ".alpha"), get<double>(doc, key + ".zeta"),
          get<double>(doc, key + ".varpi"), get<double>(doc, key + ".gamma_stop")};
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  const ArrayGeometry& a = c.system.array;
  return {
      {"array",
       {{"num_antennas", a.num_antennas},
        {"carrier_hz", kSpeedOfLight / a.wavelength},
        {"spacing_wavelengths", a.spacing / a.wavelength},
        {"projection", projection_name(a.projection)}}},
      {"timing",
       {{"symbol_period", c.system.symbol_period}, {"symbols_per_cpi", c.system.symbols_per_cpi}}},
      {"pathloss", {{"beta", c.system.pathloss.beta}, {"sigma_rcs", c.system.pathloss.sigma_rcs}}},
      {"power_dbm", c.power_dbm},
      {"noise",
       {{"sigma_c2", c.noise.sigma_c2},
        {"sigma_e2", c.noise.sigma_e2},
        {"include_transmit_power", c.noise.include_transmit_power}}},
      {"motion", {{"sigma_vx2", c.motion.sigma_vx2}, {"sigma_vy2", c.motion.sigma_vy2}}},
      {"initial", state_json(c.initial)},
      {"num_cpis", c.num_cpis},
      {"method", to_string(c.method)},
      {"adam",
       {{"x", adam_axis_json(c.adam.x)},
        {"y", adam_axis_json(c.adam.y)},
        {"epsilon", c.adam.epsilon},
        {"max_iterations", c.adam.max_iterations}}},
      {"ekf", {{"p_init_scale", c.p_init_scale}}},
      {"feedback_period_s", c.feedback_period_s},
      {"convergence",
       {{"state", state_json(c.convergence.state)},
        {"v_init", {{"vx", c.convergence.v_init.x()}, {"vy", c.convergence.v_init.y()}}},
        {"seeds", c.convergence.num_seeds},
        {"noiseless", c.convergence.noiseless}}},
      {"seed", c.seed},
      {"out", c.out_dir},
  };
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  const json defaults = config_to_json(ExperimentConfig{});
  check_known_keys(doc, defaults, "");
  json merged = defaults;
  merged.merge_patch(doc);

  ExperimentConfig c;
  const auto projection = get<std::string>(merged, "array.projection");
  if (projection != "absolute" && projection != "signed") {
    throw ConfigError("array.projection", "must be 'absolute' or 'signed'");
  }
  const double carrier = get<double>(merged, "array.carrier_hz");
  if (!(carrier > 0.0)) throw ConfigError("array.carrier_hz", "must be positive");
  c.system.array = ArrayGeometry::half_wavelength(
      get<int>(merged, "array.num_antennas"), carrier,
      projection == "absolute" ? Projection::Absolute : Projection::Signed);
  const double spacing = get<double>(merged, "array.spacing_wavelengths");
  if (!(spacing > 0.0)) throw ConfigError("array.spacing_wavelengths", "must be positive");
  c.system.array.spacing = spacing * c.system.array.wavelength;
  c.system.symbol_period = get<double>(merged, "timing.symbol_period");
  c.system.symbols_per_cpi = get<int>(merged, "timing.symbols_per_cpi");
  c.system.pathloss = {get<double>(merged, "pathloss.beta"), get<double>(merged, "pathloss.sigma_rcs")};
  c.power_dbm = get<double>(merged, "power_dbm");
  c.noise = {get<double>(merged, "noise.sigma_c2"), get<double>(merged, "noise.sigma_e2"),
             get<bool>(merged, "noise.include_transmit_power")};
  c.motion = {get<double>(merged, "motion.sigma_vx2"), get<double>(merged, "motion.sigma_vy2")};
  c.initial = get_state(merged, "initial");
  c.num_cpis = get<long>(merged, "num_cpis");
  c.method = method_from_string(get<std::string>(merged, "method"));
  c.adam.x = get_axis(merged, "adam.x");
  c.adam.y = get_axis(merged, "adam.y");
  c.adam.epsilon = get<double>(merged, "adam.epsilon");
  c.adam.max_iterations = get<int>(merged, "adam.max_iterations");
  c.p_init_scale = get<double>(merged, "ekf.p_init_scale");
  c.feedback_period_s = get<double>(merged, "feedback_period_s");
  c.convergence.state = get_state(merged, "convergence.state");
  c.convergence.v_init = {get<double>(merged, "convergence.v_init.vx"),
                          get<double>(merged, "convergence.v_init.vy")};
  c.convergence.num_seeds = get<int>(merged, "convergence.seeds");
  c.convergence.noiseless = get<bool>(merged, "convergence.noiseless");
  c.seed = get<std::uint64_t>(merged, "seed");
  c.out_dir = get<std::string>(merged, "out");
  c.validate();
  return c;
}

void apply_override(json& doc, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? key.npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty key segment");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config", "'" + path + "' is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

}  // namespace nfbeam
