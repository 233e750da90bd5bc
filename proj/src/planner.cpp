#include "auvplan/planner.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>

#include "auvplan/error.hpp"
#include "parallel.hpp"

namespace auvplan {
namespace {

// (cost-to-go, steps-to-go), compared lexicographically.
using Label = std::pair<Cost, std::uint32_t>;
constexpr Label kNoLabel{kUnreachable, kNoSteps};

Label label_of(const FeedbackPlan& plan, StateIndex z) {
  return {plan.cost_to_go[z], plan.steps_to_go[z]};
}

// Value of taking edge `e`: its weight plus the best (optimistic) or worst
// (worst-case) member label. nullopt when the edge cannot reach the goal.
std::optional<Label> edge_value(const PlanningGraph& graph, const Edge& e, const FeedbackPlan& plan) {
  const auto members = graph.outcomes(e);
  std::optional<Label> pick;
  for (StateIndex m : members) {
    const Label l = label_of(plan, m);
    if (plan.semantics == OutcomeSemantics::Optimistic) {
      if (l.first == kUnreachable) continue;
      if (!pick || l < *pick) pick = l;
    } else {
      if (l.first == kUnreachable) return std::nullopt;
      if (!pick || l > *pick) pick = l;
    }
  }
  if (!pick) return std::nullopt;
  return Label{pick->first + e.weight, pick->second + 1};
}

// Best edge by (value, action priority). Edges of one state have distinct actions.
const Edge* best_edge(const PlanningGraph& graph, StateIndex z, const FeedbackPlan& plan,
                      Label* value_out) {
  const Edge* best = nullptr;
  Label best_value = kNoLabel;
  for (const Edge& e : graph.edges_of(z)) {
    const auto v = edge_value(graph, e, plan);
    if (!v) continue;
    if (!best || *v < best_value ||
        (*v == best_value && priority_rank(e.action) < priority_rank(best->action))) {
      best = &e;
      best_value = *v;
    }
  }
  if (value_out) *value_out = best_value;
  return best;
}

std::string label_text(Cost c, std::uint32_t steps) {
  if (c == kUnreachable) return "unreachable";
  return std::to_string(c) + " (" + std::to_string(steps) + " steps)";
}

}  // namespace

std::string_view semantics_name(OutcomeSemantics s) {
  return s == OutcomeSemantics::Optimistic ? "optimistic" : "worst_case";
}

OutcomeSemantics parse_semantics(std::string_view name) {
  if (name == "optimistic") return OutcomeSemantics::Optimistic;
  if (name == "worst_case") return OutcomeSemantics::WorstCase;
  throw ValidationError("unknown outcome semantics '" + std::string(name) + "'");
}

PlanningGraph::PlanningGraph(std::size_t state_count, CostSet costs,
                             std::vector<std::uint32_t> offsets, std::vector<Edge> edges,
                             std::vector<StateIndex> targets)
    : state_count_(state_count),
      costs_(costs),
      offsets_(std::move(offsets)),
      edges_(std::move(edges)),
      targets_(std::move(targets)) {
  if (offsets_.size() != state_count_ + 1) throw std::invalid_argument("bad graph offsets");
}

const Edge* PlanningGraph::find_edge(StateIndex z, Action a) const {
  for (const Edge& e : edges_of(z))
    if (e.action == a) return &e;
  return nullptr;
}

PlanningGraph build_graph(const TransitionModel& model, const CostSet& costs) {
  costs.validate();
  const Lattice& lattice = model.lattice();
  const std::size_t n = lattice.size();

  std::vector<std::vector<std::pair<Action, OutcomeSet>>> per_state(n);
  detail::parallel_for(n, [&](std::size_t i) {
    const auto z = static_cast<StateIndex>(i);
    if (!lattice.is_free(z)) return;
    const State s = lattice.decode(z);
    for (Action a : kAllActions) {
      auto out = model.try_successors(s, a);
      if (!out) continue;
      if (a != Action::Drift && out->members.size() == 1 && out->members.front() == z) continue;
      per_state[i].emplace_back(a, std::move(*out));
    }
  });

  std::vector<std::uint32_t> offsets(n + 1, 0);
  std::vector<Edge> edges;
  std::vector<StateIndex> targets;
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i] = static_cast<std::uint32_t>(edges.size());
    for (auto& [action, outcome] : per_state[i]) {
      Edge e;
      e.source = static_cast<StateIndex>(i);
      e.action = action;
      e.weight = action_cost(action, costs);
      e.nominal = outcome.nominal;
      e.first = static_cast<std::uint32_t>(targets.size());
      e.count = static_cast<std::uint32_t>(outcome.members.size());
      targets.insert(targets.end(), outcome.members.begin(), outcome.members.end());
      edges.push_back(e);
    }
  }
  offsets[n] = static_cast<std::uint32_t>(edges.size());
  return PlanningGraph(n, costs, std::move(offsets), std::move(edges), std::move(targets));
}

FeedbackPlan compute_feedback_plan(const PlanningGraph& graph, const Lattice& lattice,
                                   const GoalSpec& goal, OutcomeSemantics semantics) {
  const std::size_t n = graph.state_count();
  if (n != lattice.size()) throw ValidationError("graph and lattice sizes differ");
  const auto goals = lattice.goal_states(goal);

  FeedbackPlan plan;
  plan.goal = goal;
  plan.semantics = semantics;
  plan.costs = graph.costs();
  plan.action_of.assign(n, std::nullopt);
  plan.cost_to_go.assign(n, kUnreachable);
  plan.steps_to_go.assign(n, kNoSteps);
  plan.goal_mask.assign(n, 0);

  // Reverse adjacency: for every state, the edges that list it as an outcome.
  std::vector<std::uint32_t> rev_offsets(n + 1, 0);
  const auto edges = graph.edges();
  for (const Edge& e : edges)
    for (StateIndex m : graph.outcomes(e)) ++rev_offsets[m + 1];
  for (std::size_t i = 0; i < n; ++i) rev_offsets[i + 1] += rev_offsets[i];
  std::vector<std::uint32_t> rev_edges(rev_offsets[n]);
  {
    auto fill = rev_offsets;
    for (std::uint32_t ei = 0; ei < edges.size(); ++ei)
      for (StateIndex m : graph.outcomes(edges[ei])) rev_edges[fill[m]++] = ei;
  }

  // Worst-case valuation waits until every outcome of an edge is settled.
  std::vector<std::uint32_t> pending;
  if (semantics == OutcomeSemantics::WorstCase) {
    pending.resize(edges.size());
    for (std::size_t ei = 0; ei < edges.size(); ++ei) pending[ei] = edges[ei].count;
  }

  using Entry = std::tuple<Cost, std::uint32_t, StateIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (StateIndex g : goals) {
    plan.goal_mask[g] = 1;
    plan.cost_to_go[g] = 0;
    plan.steps_to_go[g] = 0;
    queue.emplace(0, 0, g);
  }

  std::vector<std::uint8_t> settled(n, 0);
  while (!queue.empty()) {
    const auto [cost, steps, z] = queue.top();
    queue.pop();
    if (settled[z] || Label{cost, steps} != label_of(plan, z)) continue;
    settled[z] = 1;

    for (std::uint32_t k = rev_offsets[z]; k < rev_offsets[z + 1]; ++k) {
      const Edge& e = edges[rev_edges[k]];
      if (semantics == OutcomeSemantics::WorstCase && --pending[rev_edges[k]] != 0) continue;
      if (settled[e.source]) continue;
      // Settlement order is non-decreasing, so for worst-case edges the
      // member settled last carries the maximum label.
      const Label candidate{cost + e.weight, steps + 1};
      if (candidate < label_of(plan, e.source)) {
        plan.cost_to_go[e.source] = candidate.first;
        plan.steps_to_go[e.source] = candidate.second;
        queue.emplace(candidate.first, candidate.second, e.source);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto z = static_cast<StateIndex>(i);
    if (plan.is_goal(z) || !plan.reachable(z)) continue;
    if (const Edge* e = best_edge(graph, z, plan, nullptr)) plan.action_of[z] = e->action;
  }
  return plan;
}

OracleResult per_state_dijkstra_oracle(const PlanningGraph& graph, const Lattice& lattice,
                                       StateIndex start, const GoalSpec& goal) {
  const std::size_t n = graph.state_count();
  if (start >= n || !lattice.is_free(start)) throw ValidationError("oracle start is not a free state");
  const auto goals = lattice.goal_states(goal);
  std::vector<std::uint8_t> is_goal(n, 0);
  for (StateIndex g : goals) is_goal[g] = 1;
  if (is_goal[start]) return {0, 0, std::nullopt};

  // Label: (cost from start, transitions, priority rank of the first action).
  using Key = std::tuple<Cost, std::uint32_t, int>;
  const Key none{kUnreachable, kNoSteps, 0};
  std::vector<Key> best(n, none);
  std::vector<std::uint8_t> done(n, 0);
  using Entry = std::tuple<Cost, std::uint32_t, int, StateIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  best[start] = {0, 0, -1};
  queue.emplace(0, 0, -1, start);

  while (!queue.empty()) {
    const auto [cost, steps, rank, z] = queue.top();
    queue.pop();
    if (done[z] || Key{cost, steps, rank} != best[z]) continue;
    done[z] = 1;
    if (is_goal[z]) {
      return {cost, steps, kActionsByPriority[static_cast<std::size_t>(rank)]};
    }
    for (const Edge& e : graph.edges_of(z)) {
      const int first = (z == start) ? priority_rank(e.action) : rank;
      const Key candidate{cost + e.weight, steps + 1, first};
      for (StateIndex m : graph.outcomes(e)) {
        if (!done[m] && candidate < best[m]) {
          best[m] = candidate;
          queue.emplace(std::get<0>(candidate), std::get<1>(candidate), first, m);
        }
      }
    }
  }
  return {};
}

PlanLookup plan_action(const FeedbackPlan& plan, const Lattice& lattice, const State& state) {
  const StateIndex z = lattice.encode(state);
  if (plan.is_goal(z)) return {PlanStatus::AtGoal, std::nullopt};
  if (!plan.reachable(z) || !plan.action_of[z]) return {PlanStatus::Unreachable, std::nullopt};
  return {PlanStatus::Act, plan.action_of[z]};
}

StateIndex preferred_outcome(const FeedbackPlan& plan, std::span<const StateIndex> members) {
  if (members.empty()) throw std::invalid_argument("empty outcome set");
  StateIndex best = members.front();
  for (StateIndex m : members) {
    const auto key = std::tuple{plan.cost_to_go[m], plan.steps_to_go[m], m};
    if (key < std::tuple{plan.cost_to_go[best], plan.steps_to_go[best], best}) best = m;
  }
  return best;
}

std::vector<Violation> check_bellman(const PlanningGraph& graph, const FeedbackPlan& plan) {
  std::vector<Violation> out;
  const std::size_t n = graph.state_count();
  if (plan.size() != n) {
    out.push_back({0, "plan has " + std::to_string(plan.size()) + " states, graph has " +
                          std::to_string(n)});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = static_cast<StateIndex>(i);
    const auto report = [&](std::string msg) { out.push_back({z, std::move(msg)}); };

    if (plan.is_goal(z)) {
      if (plan.cost_to_go[z] != 0 || plan.steps_to_go[z] != 0 || plan.action_of[z])
        report("goal state must have cost 0, 0 steps and no action");
      continue;
    }
    Label best = kNoLabel;
    const Edge* chosen = best_edge(graph, z, plan, &best);
    const Label stored = label_of(plan, z);
    if (!chosen) {
      if (stored.first != kUnreachable || plan.action_of[z])
        report("no edge reaches the goal but state is marked reachable with " +
               label_text(stored.first, stored.second));
      continue;
    }
    if (stored.first != best.first) {
      report("cost_to_go " + label_text(stored.first, stored.second) +
             " but best action backup gives " + label_text(best.first, best.second));
    } else if (stored.second != best.second) {
      report("steps_to_go " + std::to_string(stored.second) + " but best backup gives " +
             std::to_string(best.second));
    } else if (plan.action_of[z] != chosen->action) {
      report("action " +
             std::string(plan.action_of[z] ? action_name(*plan.action_of[z]) : "<none>") +
             " does not match preferred optimal action " + std::string(action_name(chosen->action)));
    }
  }
  return out;
}

std::vector<Violation> check_oracle(const PlanningGraph& graph, const Lattice& lattice,
                                    const FeedbackPlan& plan, std::span<const StateIndex> starts) {
  std::vector<Violation> out;
  for (StateIndex z : starts) {
    if (!lattice.is_free(z)) continue;
    const OracleResult o = per_state_dijkstra_oracle(graph, lattice, z, plan.goal);
    if (o.cost != plan.cost_to_go[z]) {
      out.push_back({z, "cost_to_go " + label_text(plan.cost_to_go[z], plan.steps_to_go[z]) +
                            " but oracle finds " + label_text(o.cost, o.steps)});
    } else if (o.first_action != plan.action_of[z]) {
      out.push_back({z, "action " +
                            std::string(plan.action_of[z] ? action_name(*plan.action_of[z]) : "<none>") +
                            " but oracle chooses " +
                            std::string(o.first_action ? action_name(*o.first_action) : "<none>")});
    }
  }
  return out;
}

}  // namespace auvplan
