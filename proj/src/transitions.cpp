#include "auvplan/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "auvplan/error.hpp"

namespace auvplan {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::array<std::array<int, 2>, kHeadingCount> kCompass = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int wrap_heading(int h) { return ((h % kHeadingCount) + kHeadingCount) % kHeadingCount; }

}  // namespace

int priority_rank(Action a) {
  for (std::size_t i = 0; i < kActionsByPriority.size(); ++i)
    if (kActionsByPriority[i] == a) return static_cast<int>(i);
  return static_cast<int>(kActionsByPriority.size());
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Drift: return "DRIFT";
    case Action::Forward: return "FORWARD";
    case Action::RotateLeft: return "ROTATE_LEFT";
    case Action::RotateRight: return "ROTATE_RIGHT";
    case Action::Up: return "UP";
    case Action::Down: return "DOWN";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view name) {
  for (Action a : kAllActions)
    if (action_name(a) == name) return a;
  return std::nullopt;
}

void CostSet::validate() const {
  if (!(0 <= drift && drift < glide && glide < forward && forward < rotate)) {
    throw ValidationError("action costs must satisfy 0 <= drift < glide < forward < rotate (got " +
                          std::to_string(drift) + ", " + std::to_string(glide) + ", " +
                          std::to_string(forward) + ", " + std::to_string(rotate) + ")");
  }
}

Cost action_cost(Action a, const CostSet& costs) {
  switch (a) {
    case Action::Drift: return costs.drift;
    case Action::Forward: return costs.forward;
    case Action::RotateLeft:
    case Action::RotateRight: return costs.rotate;
    case Action::Up:
    case Action::Down: return costs.glide;
  }
  return costs.rotate;
}

double angular_distance(double theta, double theta_w) {
  const double d = std::fabs(theta - theta_w);
  return std::min(d, kTwoPi - d);
}

double alignment_score(double theta, double theta_w) {
  const double degrees = angular_distance(theta, theta_w) * 180.0 / kPi;
  return degrees / 180.0;
}

int displacement_cells(double score) {
  if (score <= 0.2) return 2;
  if (score <= 0.5) return 1;
  return 0;
}

std::optional<double> flow_direction(const FlowField& field, const Cell& cell, double dt) {
  const Cell mapped = map_cell(field, cell, dt);
  if (mapped == cell) return std::nullopt;
  double theta = std::atan2(static_cast<double>(mapped.iy - cell.iy),
                            static_cast<double>(mapped.ix - cell.ix));
  if (theta < 0.0) theta += kTwoPi;
  return theta;
}

int compass_step(double theta) {
  return wrap_heading(static_cast<int>(std::floor(theta / (kPi / 4.0) + 0.5)));
}

TransitionModel::TransitionModel(const FlowField& field, KinematicsConfig config)
    : field_(&field), lattice_(field), config_(config) {
  if (!(config_.dt > 0.0) || !std::isfinite(config_.dt))
    throw ValidationError("time step dt must be positive");
}

Cell TransitionModel::step(const Cell& from, int dir) const {
  const Position p = field_->center_of(from);
  const double s = field_->geometry().cell_size;
  const auto& d = kCompass[static_cast<std::size_t>(dir)];
  return field_->nearest_free_cell(from.layer, p.x + d[0] * s, p.y + d[1] * s);
}

Cell TransitionModel::advance(Cell from, int dir, int steps) const {
  for (int i = 0; i < steps; ++i) from = step(from, dir);
  return from;
}

OutcomeSet TransitionModel::outcome(const State& from, const State& to,
                                    std::optional<int> motion_dir) const {
  OutcomeSet out;
  out.nominal = lattice_.encode(to);
  out.members.push_back(out.nominal);
  const int dx = to.ix - from.ix;
  const int dy = to.iy - from.iy;
  if (!motion_dir || (dx == 0 && dy == 0) || !config_.uncertainty.lateral_dispersal) return out;

  // Lateral spread is perpendicular to the realized displacement, which can
  // differ from the commanded direction after boundary or land redirection.
  const int dir = compass_step(std::atan2(static_cast<double>(dy), static_cast<double>(dx)));
  for (int side : {2, -2}) {
    const auto& d = kCompass[static_cast<std::size_t>(wrap_heading(dir + side))];
    const Cell c{to.ix + d[0], to.iy + d[1], to.layer};
    if (lattice_.is_free(c)) out.members.push_back(lattice_.encode({c.ix, c.iy, c.layer, to.heading}));
  }
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  return out;
}

std::optional<OutcomeSet> TransitionModel::try_successors(const State& s, Action a) const {
  lattice_.encode(s);  // validates the state
  const double dt = config_.dt;
  const double heading = heading_radians(s.heading);

  switch (a) {
    case Action::RotateLeft:
    case Action::RotateRight: {
      State to = s;
      to.heading = wrap_heading(s.heading + (a == Action::RotateLeft ? 1 : -1));
      return outcome(s, to, std::nullopt);
    }
    case Action::Drift: {
      const auto theta_w = flow_direction(*field_, s.cell(), dt);
      if (!theta_w) return outcome(s, s, std::nullopt);
      const int dir = compass_step(*theta_w);
      const Cell end = advance(s.cell(), dir, displacement_cells(alignment_score(heading, *theta_w)));
      return outcome(s, {end.ix, end.iy, end.layer, s.heading}, dir);
    }
    case Action::Forward: {
      const auto theta_w = flow_direction(*field_, s.cell(), dt);
      int steps = 1;
      if (theta_w) {
        const double score = alignment_score(heading, *theta_w);
        if (score <= 0.5) steps = displacement_cells(score);
        else steps = config_.strict_paper_displacement ? 0 : 1;
      }
      const Cell end = advance(s.cell(), s.heading, steps);
      return outcome(s, {end.ix, end.iy, end.layer, s.heading}, s.heading);
    }
    case Action::Up:
    case Action::Down: {
      const Cell target{s.ix, s.iy, s.layer + (a == Action::Up ? -1 : 1)};
      if (!lattice_.is_free(target)) return std::nullopt;
      const auto theta_w = flow_direction(*field_, target, dt);
      const State arrived{target.ix, target.iy, target.layer, s.heading};
      if (!theta_w) return outcome(arrived, arrived, std::nullopt);
      const int dir = compass_step(*theta_w);
      const Cell end = advance(target, dir, displacement_cells(alignment_score(heading, *theta_w)));
      return outcome(arrived, {end.ix, end.iy, end.layer, s.heading}, dir);
    }
  }
  return std::nullopt;
}

OutcomeSet TransitionModel::successors(const State& s, Action a) const {
  auto out = try_successors(s, a);
  if (!out) {
    throw ActionUnavailable(std::string(action_name(a)) + " is unavailable at layer " +
                            std::to_string(s.layer));
  }
  return std::move(*out);
}

}  // namespace auvplan
