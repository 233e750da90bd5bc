#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auvplan/lattice.hpp"
#include "auvplan/transitions.hpp"

namespace auvplan {

inline constexpr Cost kUnreachable = std::numeric_limits<Cost>::max();
inline constexpr std::uint32_t kNoSteps = std::numeric_limits<std::uint32_t>::max();

/// How an action's outcome set is valued during planning: by its best member
/// (optimistic, the default) or its worst member (robust).
enum class OutcomeSemantics { Optimistic, WorstCase };

std::string_view semantics_name(OutcomeSemantics s);
OutcomeSemantics parse_semantics(std::string_view name);  ///< throws ValidationError

/// One action from one state: a hyperedge onto its outcome set.
struct Edge {
  StateIndex source = 0;
  Action action = Action::Drift;
  Cost weight = 0;
  StateIndex nominal = 0;
  std::uint32_t first = 0;  ///< offset of the outcome members in the target array
  std::uint32_t count = 0;
};

class PlanningGraph {
 public:
  PlanningGraph(std::size_t state_count, CostSet costs, std::vector<std::uint32_t> offsets,
                std::vector<Edge> edges, std::vector<StateIndex> targets);

  std::size_t state_count() const { return state_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const CostSet& costs() const { return costs_; }

  std::span<const Edge> edges_of(StateIndex z) const {
    return {edges_.data() + offsets_[z], edges_.data() + offsets_[z + 1]};
  }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const StateIndex> outcomes(const Edge& e) const {
    return {targets_.data() + e.first, e.count};
  }
  const Edge* find_edge(StateIndex z, Action a) const;

 private:
  std::size_t state_count_;
  CostSet costs_;
  std::vector<std::uint32_t> offsets_;  // size state_count + 1
  std::vector<Edge> edges_;
  std::vector<StateIndex> targets_;
};

/// One hyperedge per free state and available action, weighted by the
/// action's cost. Non-drift actions whose only outcome is the source state
/// are omitted: they cost energy and change nothing. Drift keeps its
/// self-loops (floating in place).
PlanningGraph build_graph(const TransitionModel& model, const CostSet& costs);

/// Total map from states to (action, cost-to-go).
///
/// `steps_to_go` is the fewest transitions among the minimum-energy ways to
/// reach the goal; it orders zero-cost moves so that following the plan
/// always makes progress.
struct FeedbackPlan {
  GoalSpec goal;
  OutcomeSemantics semantics = OutcomeSemantics::Optimistic;
  CostSet costs;
  std::vector<std::optional<Action>> action_of;
  std::vector<Cost> cost_to_go;
  std::vector<std::uint32_t> steps_to_go;
  std::vector<std::uint8_t> goal_mask;

  std::size_t size() const { return cost_to_go.size(); }
  bool is_goal(StateIndex z) const { return goal_mask[z] != 0; }
  bool reachable(StateIndex z) const { return cost_to_go[z] != kUnreachable; }
};

/// Goal-rooted Dijkstra sweep over the reverse graph. Among optimal actions
/// the first in kActionsByPriority wins.
FeedbackPlan compute_feedback_plan(const PlanningGraph& graph, const Lattice& lattice,
                                   const GoalSpec& goal,
                                   OutcomeSemantics semantics = OutcomeSemantics::Optimistic);

struct OracleResult {
  Cost cost = kUnreachable;
  std::uint32_t steps = kNoSteps;
  std::optional<Action> first_action;
  bool reachable() const { return cost != kUnreachable; }
};

/// Single-start forward search to the goal set (optimistic semantics).
/// Independent of compute_feedback_plan; used to cross-check it.
OracleResult per_state_dijkstra_oracle(const PlanningGraph& graph, const Lattice& lattice,
                                       StateIndex start, const GoalSpec& goal);

enum class PlanStatus { Act, AtGoal, Unreachable };

struct PlanLookup {
  PlanStatus status = PlanStatus::Unreachable;
  std::optional<Action> action;  ///< set only for PlanStatus::Act
};

/// Throws for land or out-of-bounds states.
PlanLookup plan_action(const FeedbackPlan& plan, const Lattice& lattice, const State& state);

/// The member a disturbance-free vehicle ends up in: least cost-to-go, then
/// fewest steps-to-go, then smallest index.
StateIndex preferred_outcome(const FeedbackPlan& plan, std::span<const StateIndex> members);

struct Violation {
  StateIndex index = 0;
  std::string message;
};

/// Exact Bellman consistency of every state under the plan's semantics.
std::vector<Violation> check_bellman(const PlanningGraph& graph, const FeedbackPlan& plan);

/// Compares cost and first action against the oracle for each start.
std::vector<Violation> check_oracle(const PlanningGraph& graph, const Lattice& lattice,
                                    const FeedbackPlan& plan, std::span<const StateIndex> starts);

}  // namespace auvplan
