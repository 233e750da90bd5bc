#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "auvplan/lattice.hpp"
#include "auvplan/planner.hpp"
#include "auvplan/transitions.hpp"

namespace auvplan {

/// With probability `dispersal_probability` the vehicle lands on a random
/// non-preferred member of the outcome set instead of the preferred one.
struct DisturbanceConfig {
  double dispersal_probability = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  ///< probability must lie in [0, 1]
};

enum class Terminal { ReachedGoal, StepLimit, Stuck };

std::string_view terminal_name(Terminal t);  ///< REACHED_GOAL, STEP_LIMIT, STUCK

struct TrajectoryStep {
  State state;
  Action action = Action::Drift;
  std::vector<StateIndex> outcomes;  ///< members the vehicle could have landed in
  State successor;
  Cost energy = 0;                   ///< cumulative, including this step
};

struct Trajectory {
  State start;
  std::vector<TrajectoryStep> steps;
  Terminal terminal = Terminal::Stuck;

  Cost energy() const { return steps.empty() ? 0 : steps.back().energy; }
  const State& final_state() const { return steps.empty() ? start : steps.back().successor; }
};

/// Executes the plan from `start`. The random stream is derived from
/// (seed, start index), so results do not depend on rollout order.
/// Throws for land or out-of-bounds starts.
Trajectory rollout(const FeedbackPlan& plan, const TransitionModel& model, const State& start,
                   const DisturbanceConfig& disturbance, int max_steps);

struct BatchSummary {
  std::size_t runs = 0;
  std::size_t reached = 0;
  std::size_t stuck = 0;
  std::size_t step_limit = 0;
  double fraction_reached = 0.0;
  double mean_energy = 0.0;  ///< over runs that reached the goal
  double mean_steps = 0.0;   ///< over runs that reached the goal
  bool empty() const { return runs == 0; }
};

/// One rollout from every reachable free state, goal states included.
BatchSummary batch_reachability(const FeedbackPlan& plan, const TransitionModel& model,
                                const DisturbanceConfig& disturbance, int max_steps);

/// Columns: step ix iy layer heading_deg action energy_cum terminal.
/// One row per visited state; the final row carries the terminal marker.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);

}  // namespace auvplan
