#include "auvplan/config.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <sstream>

#include "auvplan/error.hpp"
#include "auvplan/hash.hpp"
#include "auvplan/text_util.hpp"

namespace auvplan {
namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ParseError("invalid value '" + std::string(value) + "' for config key '" +
                   std::string(key) + "'");
}

bool parse_switch(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  bad_value(key, value);
}

int parse_int(std::string_view key, std::string_view value) {
  const auto v = text::parse_number<int>(value);
  if (!v) bad_value(key, value);
  return *v;
}

Cost parse_cost(std::string_view key, std::string_view value) {
  const auto v = text::parse_number<Cost>(value);
  if (!v) bad_value(key, value);
  return *v;
}

double parse_positive(std::string_view key, std::string_view value) {
  const auto v = text::parse_number<double>(value);
  if (!v || !std::isfinite(*v) || *v <= 0.0) bad_value(key, value);
  return *v;
}

int parse_heading(std::string_view key, std::string_view value) {
  const auto v = text::parse_number<double>(value);
  if (!v) bad_value(key, value);
  try {
    return heading_from_degrees(*v);
  } catch (const ValidationError&) {
    bad_value(key, value);
  }
}

}  // namespace

void PlannerConfig::set(std::string_view key, std::string_view value) {
  if (key == "dt_s") dt = parse_positive(key, value);
  else if (key == "v_ref_mps") v_ref = parse_positive(key, value);
  else if (key == "c_drift") costs.drift = parse_cost(key, value);
  else if (key == "c_glide") costs.glide = parse_cost(key, value);
  else if (key == "c_forward") costs.forward = parse_cost(key, value);
  else if (key == "c_rotate") costs.rotate = parse_cost(key, value);
  else if (key == "dispersal") dispersal = parse_switch(key, value);
  else if (key == "strict_paper_displacement") strict_paper_displacement = parse_switch(key, value);
  else if (key == "outcome_semantics") {
    try {
      semantics = parse_semantics(value);
    } catch (const ValidationError&) {
      bad_value(key, value);
    }
  } else if (key == "goal_ix") goal_ix = parse_int(key, value);
  else if (key == "goal_iy") goal_iy = parse_int(key, value);
  else if (key == "goal_layer") goal_layer = parse_int(key, value);
  else if (key == "goal_heading_deg") {
    if (value == "any") goal_heading.reset();
    else goal_heading = parse_heading(key, value);
  } else if (key == "initial_heading_deg") initial_heading = parse_heading(key, value);
  else throw ParseError("unknown config key '" + std::string(key) + "'");
}

void PlannerConfig::validate() const {
  costs.validate();
  if (dt && v_ref) throw ValidationError("config must give at most one of dt_s and v_ref_mps");
}

double PlannerConfig::time_step(const GridGeometry& geometry) const {
  if (dt) return *dt;
  return default_time_step(geometry, v_ref.value_or(0.5));
}

KinematicsConfig PlannerConfig::kinematics(const GridGeometry& geometry) const {
  KinematicsConfig k;
  k.dt = time_step(geometry);
  k.uncertainty.lateral_dispersal = dispersal;
  k.strict_paper_displacement = strict_paper_displacement;
  return k;
}

GoalSpec PlannerConfig::goal() const {
  if (!goal_ix || !goal_iy || !goal_layer)
    throw ValidationError("config must define goal_ix, goal_iy and goal_layer");
  return {{*goal_ix, *goal_iy, *goal_layer}, goal_heading};
}

std::string PlannerConfig::canonical() const {
  std::map<std::string, std::string> kv;
  if (dt) kv["dt_s"] = text::format_double(*dt);
  else kv["v_ref_mps"] = text::format_double(v_ref.value_or(0.5));
  kv["c_drift"] = std::to_string(costs.drift);
  kv["c_glide"] = std::to_string(costs.glide);
  kv["c_forward"] = std::to_string(costs.forward);
  kv["c_rotate"] = std::to_string(costs.rotate);
  kv["dispersal"] = dispersal ? "on" : "off";
  kv["strict_paper_displacement"] = strict_paper_displacement ? "on" : "off";
  kv["outcome_semantics"] = std::string(semantics_name(semantics));
  if (goal_ix) kv["goal_ix"] = std::to_string(*goal_ix);
  if (goal_iy) kv["goal_iy"] = std::to_string(*goal_iy);
  if (goal_layer) kv["goal_layer"] = std::to_string(*goal_layer);
  kv["goal_heading_deg"] = goal_heading ? std::to_string(heading_degrees(*goal_heading)) : "any";
  kv["initial_heading_deg"] = std::to_string(heading_degrees(initial_heading));

  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

PlannerConfig parse_config(std::istream& in) {
  PlannerConfig config;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(number) + ": expected key = value");
    config.set(text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)));
  }
  return config;
}

PlannerConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

std::string config_hash(const std::string& field_hash, const PlannerConfig& config) {
  return to_hex(fnv1a64(field_hash + "\n" + config.canonical()));
}

}  // namespace auvplan
