#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "deflect/scenario.hpp"

// Scenario file ingestion. All values are SI with unit-suffixed keys
// (a_au, power_mw, cm_ns_per_j, miss_re, ...); conversion to canonical units
// happens at construction. Validation aggregates every error instead of
// failing fast.

namespace deflect {

struct ScenarioLoadResult {
  bool ok = false;
  ScenarioConfig config;
  std::vector<std::string> errors;
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where, std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      errors.push_back(where + ": unknown key '" + it.key() + "'");
  }
}

inline double get_num(const nlohmann::json& j, const std::string& key, double fallback,
                      const std::string& where, std::vector<std::string>& errors,
                      bool* present = nullptr) {
  if (!j.contains(key)) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  if (!j[key].is_number()) {
    errors.push_back(where + "." + key + ": expected a number");
    return fallback;
  }
  return j[key].get<double>();
}

}  // namespace detail

inline ScenarioLoadResult parse_scenario_json(const nlohmann::json& j) {
  ScenarioLoadResult res;
  auto& errors = res.errors;
  ScenarioConfig& c = res.config;

  if (!j.is_object()) {
    errors.push_back("scenario: top level must be a JSON object");
    return res;
  }
  detail::check_keys(j, {"eco", "laser", "earth", "moon", "lunar", "miss_re", "soi_m",
                         "mass_loss", "crossing"},
                     "scenario", errors);

  if (j.contains("eco") && j["eco"].is_object()) {
    const auto& e = j["eco"];
    detail::check_keys(e, {"a_au", "e", "i_deg", "diameter_m", "density_kg_m3", "mass_kg"},
                       "eco", errors);
    c.a_au = detail::get_num(e, "a_au", c.a_au, "eco", errors);
    c.e = detail::get_num(e, "e", c.e, "eco", errors);
    c.i_deg = detail::get_num(e, "i_deg", c.i_deg, "eco", errors);
    c.diameter_m = detail::get_num(e, "diameter_m", c.diameter_m, "eco", errors);
    c.density_kg_m3 = detail::get_num(e, "density_kg_m3", c.density_kg_m3, "eco", errors);
    c.mass_kg = detail::get_num(e, "mass_kg", 0.0, "eco", errors, &c.mass_specified);
  } else {
    errors.push_back("scenario: missing required object 'eco'");
  }

  if (j.contains("laser") && j["laser"].is_object()) {
    const auto& l = j["laser"];
    detail::check_keys(l, {"power_mw", "cm_ns_per_j", "eta_ab"}, "laser", errors);
    c.power_mw = detail::get_num(l, "power_mw", c.power_mw, "laser", errors);
    c.cm_ns_per_j = detail::get_num(l, "cm_ns_per_j", c.cm_ns_per_j, "laser", errors);
    c.eta_ab = detail::get_num(l, "eta_ab", c.eta_ab, "laser", errors);
  } else {
    errors.push_back("scenario: missing required object 'laser'");
  }

  if (j.contains("earth")) {
    detail::check_keys(j["earth"], {"radius_au"}, "earth", errors);
    c.earth_radius_au = detail::get_num(j["earth"], "radius_au", 1.0, "earth", errors);
  }
  if (j.contains("moon")) {
    detail::check_keys(j["moon"], {"a_km", "e"}, "moon", errors);
    c.moon.a_km = detail::get_num(j["moon"], "a_km", c.moon.a_km, "moon", errors);
    c.moon.e = detail::get_num(j["moon"], "e", c.moon.e, "moon", errors);
  }
  if (j.contains("lunar")) {
    detail::check_keys(j["lunar"], {"nominal_miss_re", "pass"}, "lunar", errors);
    c.lunar.nominal_miss_re =
        detail::get_num(j["lunar"], "nominal_miss_re", 10.0, "lunar", errors);
    if (j["lunar"].contains("pass")) {
      const std::string pass = j["lunar"]["pass"].get<std::string>();
      if (pass == "prograde") c.lunar.prograde = true;
      else if (pass == "retrograde") c.lunar.prograde = false;
      else errors.push_back("lunar.pass: expected 'prograde' or 'retrograde'");
    }
  }

  c.miss_re = detail::get_num(j, "miss_re", c.miss_re, "scenario", errors);
  c.soi_m = detail::get_num(j, "soi_m", c.soi_m, "scenario", errors);

  if (j.contains("mass_loss")) {
    const std::string ml = j["mass_loss"].is_string() ? j["mass_loss"].get<std::string>() : "?";
    if (ml == "on") c.mass_loss = true;
    else if (ml == "off") c.mass_loss = false;
    else errors.push_back("scenario.mass_loss: expected 'on' or 'off'");
  }
  if (j.contains("crossing")) {
    const std::string cr = j["crossing"].is_string() ? j["crossing"].get<std::string>() : "?";
    if (cr == "inbound") c.crossing = CrossingBranch::Inbound;
    else if (cr == "outbound") c.crossing = CrossingBranch::Outbound;
    else errors.push_back("scenario.crossing: expected 'inbound' or 'outbound'");
  }

  // field-level physics checks, aggregated
  if (c.e >= 1.0 || c.e < 0.0)
    errors.push_back("eco.e: eccentricity must be in [0, 1)");
  if (c.a_au <= 0.0) errors.push_back("eco.a_au: semimajor axis must be positive");
  if (c.e < 1.0 && c.e >= 0.0 && c.a_au > 0.0) {
    if (!(c.a_au * (1.0 - c.e) < c.earth_radius_au))
      errors.push_back("eco: perihelion must lie inside Earth's orbit radius "
                       "(crossing invariant a(1-e) < r_earth violated)");
    if (!(c.earth_radius_au < c.a_au * (1.0 + c.e)))
      errors.push_back("eco: aphelion must lie outside Earth's orbit radius "
                       "(crossing invariant r_earth < a(1+e) violated)");
  }
  if (c.power_mw <= 0.0) errors.push_back("laser.power_mw: must be positive");
  if (c.cm_ns_per_j <= 0.0) errors.push_back("laser.cm_ns_per_j: must be positive");
  if (c.eta_ab <= 0.0 || c.eta_ab > 1.0) errors.push_back("laser.eta_ab: must be in (0, 1]");
  if (c.miss_re <= 0.0) errors.push_back("scenario.miss_re: must be positive");
  if (c.soi_m <= 0.0) errors.push_back("scenario.soi_m: must be positive");
  if (!c.mass_specified && (c.diameter_m <= 0.0 || c.density_kg_m3 <= 0.0))
    errors.push_back("eco: mass_kg or a positive diameter_m/density_kg_m3 pair is required");
  if (c.mass_specified && c.mass_kg <= 0.0) errors.push_back("eco.mass_kg: must be positive");

  res.ok = errors.empty();
  return res;
}

inline ScenarioLoadResult load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ScenarioLoadResult res;
    res.errors.push_back("scenario: cannot open file '" + path + "'");
    return res;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    ScenarioLoadResult res;
    res.errors.push_back(std::string("scenario: JSON parse error: ") + ex.what());
    return res;
  }
  return parse_scenario_json(j);
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["eco"]["a_au"] = c.a_au;
  j["eco"]["e"] = c.e;
  j["eco"]["i_deg"] = c.i_deg;
  j["eco"]["diameter_m"] = c.diameter_m;
  j["eco"]["density_kg_m3"] = c.density_kg_m3;
  if (c.mass_specified) j["eco"]["mass_kg"] = c.mass_kg;
  j["laser"]["power_mw"] = c.power_mw;
  j["laser"]["cm_ns_per_j"] = c.cm_ns_per_j;
  j["laser"]["eta_ab"] = c.eta_ab;
  j["earth"]["radius_au"] = c.earth_radius_au;
  j["moon"]["a_km"] = c.moon.a_km;
  j["moon"]["e"] = c.moon.e;
  j["lunar"]["nominal_miss_re"] = c.lunar.nominal_miss_re;
  j["lunar"]["pass"] = c.lunar.prograde ? "prograde" : "retrograde";
  j["miss_re"] = c.miss_re;
  j["soi_m"] = c.soi_m;
  j["mass_loss"] = c.mass_loss ? "on" : "off";
  j["crossing"] = c.crossing == CrossingBranch::Inbound ? "inbound" : "outbound";
  return j;
}

}  // namespace deflect
