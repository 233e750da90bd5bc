#pragma once

#include <filesystem>
#include <iosfwd>
#include <cstdint>
#include <string>
#include <vector>

#include "auvplan/config.hpp"
#include "auvplan/flowfield.hpp"
#include "auvplan/planner.hpp"
#include "auvplan/transitions.hpp"

namespace auvplan {

/// A plan together with everything needed to re-derive or execute it.
struct PlanDocument {
  GridGeometry geometry;  ///< origin is not carried
  PlannerConfig config;
  std::string field_hash;
  std::string config_hash;
  std::vector<std::uint8_t> land;  ///< per cell, same layout as FlowField::land()
  FeedbackPlan plan;
};

/// Plans the field under the config and stamps the result.
PlanDocument make_plan_document(const FlowField& field, const PlannerConfig& config);

/// Plan table: '#' header lines (format, heading convention, tie-break,
/// geometry, hashes, one "config key=value" line per setting), a column
/// line, then one row per state index:
///   index ix iy layer heading_deg action cost_to_go steps_to_go
/// action is an action name, AT_GOAL, UNREACHABLE or LAND; unreachable and
/// land rows carry '-' for both numeric columns.
void write_plan(std::ostream& out, const PlanDocument& doc);
void write_plan_file(const std::filesystem::path& path, const PlanDocument& doc);

/// Throws ParseError for malformed tables and ValidationError when the
/// stored config hash does not match the stored field hash and config.
PlanDocument read_plan(std::istream& in);
PlanDocument read_plan_file(const std::filesystem::path& path);

/// Throws ValidationError unless `field` is the field the plan was made from.
void require_matching_field(const PlanDocument& doc, const FlowField& field);

/// Arrow records for one layer and heading slice, one per free cell:
///   ix iy x_m y_m action glyph dx_cells dy_cells cost_to_go
/// Drift/forward/glide arrows point along the nominal displacement (glides
/// also name the arrival layer via GLIDE_UP/GLIDE_DOWN); rotations are
/// CURL_LEFT/CURL_RIGHT with zero displacement.
void write_quiver(std::ostream& out, const PlanDocument& doc, const TransitionModel& model,
                  int layer, int heading);

}  // namespace auvplan
