#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "auvplan/flowfield.hpp"
#include "auvplan/lattice.hpp"
#include "auvplan/planner.hpp"
#include "auvplan/transitions.hpp"

namespace auvplan {

// Planner configuration, a flat "key = value" document ('#' comments):
//
//   dt_s                       seconds per flow-mapping step  } at most one;
//   v_ref_mps                  dt = cell_size / v_ref         } default v_ref 0.5
//   c_drift c_glide c_forward c_rotate     integer energy costs (0 2 4 10)
//   dispersal                  on | off                       (on)
//   strict_paper_displacement  on | off                       (off)
//   outcome_semantics          optimistic | worst_case        (optimistic)
//   goal_ix goal_iy goal_layer integers, required for planning
//   goal_heading_deg           any | multiple of 45           (any)
//   initial_heading_deg        heading slice for plan exports (0, east)
struct PlannerConfig {
  std::optional<double> dt;
  std::optional<double> v_ref;
  CostSet costs;
  bool dispersal = true;
  bool strict_paper_displacement = false;
  OutcomeSemantics semantics = OutcomeSemantics::Optimistic;
  std::optional<int> goal_ix;
  std::optional<int> goal_iy;
  std::optional<int> goal_layer;
  std::optional<int> goal_heading;  ///< heading index; nullopt = any
  int initial_heading = 0;

  /// Applies one key/value pair; throws ParseError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Checks the cost ordering and the dt/v_ref exclusivity.
  void validate() const;

  double time_step(const GridGeometry& geometry) const;
  KinematicsConfig kinematics(const GridGeometry& geometry) const;
  GoalSpec goal() const;  ///< throws ValidationError when goal keys are missing

  /// Sorted key=value lines with every setting spelled out.
  std::string canonical() const;
};

PlannerConfig parse_config(std::istream& in);
PlannerConfig parse_config_text(std::string_view text);

/// Stamp for artifacts derived from `field_hash` under `config`.
std::string config_hash(const std::string& field_hash, const PlannerConfig& config);

}  // namespace auvplan
