#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>

#include "auvplan/error.hpp"
#include "auvplan/planner.hpp"
#include "auvplan/synthetic.hpp"
#include "test_support.hpp"

using namespace auvplan;
using auvplan::testing::geometry;
using auvplan::testing::uniform_field;

namespace {

KinematicsConfig kin(double dt, bool dispersal = true) {
  KinematicsConfig k;
  k.dt = dt;
  k.uncertainty.lateral_dispersal = dispersal;
  return k;
}

struct Planned {
  FlowField field;
  TransitionModel model;
  PlanningGraph graph;
  FeedbackPlan plan;

  Planned(FlowField f, KinematicsConfig k, GoalSpec goal, CostSet costs = {},
          OutcomeSemantics sem = OutcomeSemantics::Optimistic)
      : field(std::move(f)),
        model(field, k),
        graph(build_graph(model, costs)),
        plan(compute_feedback_plan(graph, model.lattice(), goal, sem)) {}
  Planned(const Planned&) = delete;

  StateIndex z(const State& s) const { return model.lattice().encode(s); }
};

// Still-water kinematics on a land-free single-layer grid, computed by
// Bellman value iteration over (ix, iy, heading). Forward moves one cell
// along the heading (clamped at the edge) and may drift one cell to either
// side of the realized move. Optimistic: best member counts.
std::map<State, Cost> still_water_values(int nx, int ny, Cell goal, bool dispersal,
                                         const CostSet& c) {
  constexpr std::array<std::array<int, 2>, 8> dirs = {
      {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  const Cost inf = kUnreachable;
  std::map<State, Cost> value;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      for (int h = 0; h < 8; ++h)
        value[{ix, iy, 0, h}] = (ix == goal.ix && iy == goal.iy) ? 0 : inf;

  auto inside = [&](int x, int y) { return x >= 0 && x < nx && y >= 0 && y < ny; };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [s, v] : value) {
      if (s.ix == goal.ix && s.iy == goal.iy) continue;
      Cost best = v;
      auto relax = [&](Cost w, Cost next) {
        if (next != inf) best = std::min(best, w + next);
      };
      relax(c.rotate, value[{s.ix, s.iy, 0, (s.heading + 1) % 8}]);
      relax(c.rotate, value[{s.ix, s.iy, 0, (s.heading + 7) % 8}]);
      const auto d = dirs[static_cast<std::size_t>(s.heading)];
      const int tx = std::clamp(s.ix + d[0], 0, nx - 1);
      const int ty = std::clamp(s.iy + d[1], 0, ny - 1);
      const int mx = tx - s.ix, my = ty - s.iy;
      if (mx != 0 || my != 0) {
        relax(c.forward, value[{tx, ty, 0, s.heading}]);
        if (dispersal) {
          // Unit perpendiculars of the realized move, scaled to grid steps.
          for (int sign : {1, -1}) {
            int px = -my * sign, py = mx * sign;
            if (mx != 0 && my != 0) {
              px = px > 0 ? 1 : (px < 0 ? -1 : 0);
              py = py > 0 ? 1 : (py < 0 ? -1 : 0);
            }
            if (inside(tx + px, ty + py)) relax(c.forward, value[{tx + px, ty + py, 0, s.heading}]);
          }
        }
      }
      if (best < v) {
        v = best;
        changed = true;
      }
    }
  }
  return value;
}

bool is_rotation(Action a) { return a == Action::RotateLeft || a == Action::RotateRight; }

}  // namespace

TEST_CASE("single free cell: rotation cycle plus drift self-loops") {
  const auto f = uniform_field(geometry(1, 1, 1), 0, 0);
  const TransitionModel m(f, kin(2000.0));
  const PlanningGraph g = build_graph(m, {});
  CHECK(g.state_count() == 8);
  CHECK(g.edge_count() == 24);
  for (StateIndex z = 0; z < 8; ++z) {
    const auto edges = g.edges_of(z);
    REQUIRE(edges.size() == 3);
    for (const Edge& e : edges) {
      REQUIRE(e.count == 1);
      const StateIndex t = g.outcomes(e)[0];
      if (e.action == Action::Drift) CHECK(t == z);
      else if (e.action == Action::RotateLeft) CHECK(t == (z + 1) % 8);
      else if (e.action == Action::RotateRight) CHECK(t == (z + 7) % 8);
      else FAIL("unexpected action");
    }
  }
}

TEST_CASE("paper-scale action counts") {
  const auto g = geometry(21, 29, 4, 2000.0);
  const auto f = generate_synthetic_field(FieldKind::DoubleGyre, g, {.amplitude = 1.0});
  const TransitionModel m(f, kin(default_time_step(g)));
  const PlanningGraph graph = build_graph(m, {});
  const Lattice& lat = m.lattice();
  CHECK(graph.state_count() == 19488);
  for (StateIndex z = 0; z < graph.state_count(); ++z) {
    const State s = lat.decode(z);
    const auto n = graph.edges_of(z).size();
    CHECK(n <= 6);
    const bool interior = s.ix > 0 && s.ix < 20 && s.iy > 0 && s.iy < 28;
    if (interior) CHECK(n >= 4);
    const bool extreme = s.layer == 0 || s.layer == 3;
    if (extreme) CHECK(n <= 5);
    if (s.layer == 0) CHECK(graph.find_edge(z, Action::Up) == nullptr);
    if (s.layer == 3) CHECK(graph.find_edge(z, Action::Down) == nullptr);
  }
}

TEST_CASE("only free states carry edges") {
  auto g = geometry(4, 3, 1);
  std::vector<std::uint8_t> land(g.cell_count(), 1);
  land[1] = land[2] = 0;
  const auto f = auvplan::testing::field_from(g, [](int, int, int) { return Velocity{0, 0}; }, land);
  const TransitionModel m(f, kin(2000.0));
  const PlanningGraph graph = build_graph(m, {});
  for (StateIndex z = 0; z < graph.state_count(); ++z) {
    const Cell c = m.lattice().decode(z).cell();
    const bool free = c.iy == 0 && (c.ix == 1 || c.ix == 2);
    CHECK(graph.edges_of(z).empty() == !free);
    for (const Edge& e : graph.edges_of(z))
      for (StateIndex t : graph.outcomes(e)) CHECK(m.lattice().is_free(t));
  }
}

TEST_CASE("goal states have cost 0 and no action") {
  const Planned p(uniform_field(geometry(4, 4, 2), 0.2, 0.1), kin(2000.0), {{1, 2, 1}, std::nullopt});
  for (int h = 0; h < 8; ++h) {
    const StateIndex z = p.z({1, 2, 1, h});
    CHECK(p.plan.is_goal(z));
    CHECK(p.plan.cost_to_go[z] == 0);
    CHECK_FALSE(p.plan.action_of[z].has_value());
    CHECK(plan_action(p.plan, p.model.lattice(), {1, 2, 1, h}).status == PlanStatus::AtGoal);
    const auto o = per_state_dijkstra_oracle(p.graph, p.model.lattice(), z, p.plan.goal);
    CHECK(o.cost == 0);
  }
}

TEST_CASE("east-flowing corridor is ridden for free") {
  // 0.5 m/s over 2000 s is exactly one cell per mapping step.
  const Planned p(uniform_field(geometry(5, 1, 1), 0.5, 0.0), kin(2000.0), {{4, 0, 0}, std::nullopt});
  for (int ix = 0; ix < 4; ++ix) {
    for (int h : {0, 1, 2, 6, 7}) {
      const StateIndex z = p.z({ix, 0, 0, h});
      CHECK(p.plan.cost_to_go[z] == 0);
      CHECK(p.plan.action_of[z] == Action::Drift);
      CHECK(per_state_dijkstra_oracle(p.graph, p.model.lattice(), z, p.plan.goal).cost == 0);
    }
  }
}

TEST_CASE("still-water spot costs") {
  const CostSet c;
  const Cell goal{2, 2, 0};
  const Planned p(uniform_field(geometry(5, 5, 1), 0, 0), kin(2000.0), {goal, std::nullopt});
  const auto brute = still_water_values(5, 5, goal, true, c);

  const StateIndex east = p.z({1, 2, 0, 0});
  CHECK(p.plan.cost_to_go[east] == c.forward);
  CHECK(p.plan.action_of[east] == Action::Forward);

  // Facing north: two rotations then Forward.
  const StateIndex north = p.z({1, 2, 0, 2});
  CHECK(brute.at({1, 2, 0, 2}) == 2 * c.rotate + c.forward);
  CHECK(p.plan.cost_to_go[north] == 24);
  CHECK(p.plan.action_of[north] == Action::RotateRight);

  // Facing away: four turns would cost 44, but three turns and two
  // Forwards whose lateral slip can land on the goal cost 38.
  const StateIndex west = p.z({1, 2, 0, 4});
  CHECK(p.plan.cost_to_go[west] == brute.at({1, 2, 0, 4}));
  CHECK(p.plan.cost_to_go[west] == 3 * c.rotate + 2 * c.forward);
  // Without slip it is the full half-turn.
  const Planned exact(uniform_field(geometry(5, 5, 1), 0, 0), kin(2000.0, false), {goal, std::nullopt});
  CHECK(exact.plan.cost_to_go[west] == 4 * c.rotate + c.forward);
  CHECK(still_water_values(5, 5, goal, false, c).at({1, 2, 0, 4}) == 44);

  for (const auto& [s, v] : brute) CHECK(p.plan.cost_to_go[p.z(s)] == v);
}

TEST_CASE("still-water costs agree with value iteration on random grids") {
  auvplan::testing::SplitMix rng{5150};
  for (int trial = 0; trial < 12; ++trial) {
    const int nx = 1 + rng.below(6), ny = 1 + rng.below(6);
    const Cell goal{rng.below(nx), rng.below(ny), 0};
    const bool dispersal = rng.below(2) == 0;
    const CostSet c{0, 1 + rng.below(3), 4 + rng.below(3), 7 + rng.below(5)};
    const Planned p(uniform_field(geometry(nx, ny, 1), 0, 0), kin(2000.0, dispersal),
                    {goal, std::nullopt}, c);
    for (const auto& [s, v] : still_water_values(nx, ny, goal, dispersal, c))
      CHECK(p.plan.cost_to_go[p.z(s)] == v);
  }
}

TEST_CASE("walled-off cells are unreachable") {
  // Column 2 is land; the goal lies east of it, (0,1) is cut off.
  const auto g = geometry(5, 3, 1);
  const auto f = uniform_field(g, 0, 0, {{2, 0, 0}, {2, 1, 0}, {2, 2, 0}});
  const Planned p(f, kin(2000.0), {{4, 1, 0}, std::nullopt});
  for (int h = 0; h < 8; ++h) {
    const StateIndex z = p.z({0, 1, 0, h});
    CHECK_FALSE(p.plan.reachable(z));
    CHECK_FALSE(p.plan.action_of[z].has_value());
    CHECK(plan_action(p.plan, p.model.lattice(), {0, 1, 0, h}).status == PlanStatus::Unreachable);
    CHECK_FALSE(per_state_dijkstra_oracle(p.graph, p.model.lattice(), z, p.plan.goal).reachable());
    CHECK(p.plan.reachable(p.z({3, 1, 0, h})));
  }
  CHECK_THROWS(plan_action(p.plan, p.model.lattice(), {2, 1, 0, 0}));
}

TEST_CASE("exact-heading goals") {
  const Planned p(uniform_field(geometry(3, 3, 1), 0, 0), kin(2000.0), {{1, 1, 0}, 2});
  CHECK(p.plan.is_goal(p.z({1, 1, 0, 2})));
  CHECK_FALSE(p.plan.is_goal(p.z({1, 1, 0, 3})));
  CHECK(p.plan.cost_to_go[p.z({1, 1, 0, 3})] == 10);
  CHECK(p.plan.action_of[p.z({1, 1, 0, 3})] == Action::RotateRight);
  CHECK(p.plan.cost_to_go[p.z({1, 1, 0, 6})] == 40);
}

namespace {

FlowField random_field(auvplan::testing::SplitMix& rng, int nx, int ny, int layers, int land_one_in) {
  const auto g = geometry(nx, ny, layers, 1000.0);
  std::vector<std::uint8_t> land(g.cell_count());
  for (auto& c : land) c = land_one_in > 0 && rng.below(land_one_in) == 0;
  land[0] = 0;
  return auvplan::testing::field_from(
      g, [&](int, int, int) { return Velocity{rng.uniform(-1.1, 1.1), rng.uniform(-1.1, 1.1)}; },
      land);
}

GoalSpec random_goal(auvplan::testing::SplitMix& rng, const FlowField& f) {
  const auto& g = f.geometry();
  for (;;) {
    const Cell c{rng.below(g.nx), rng.below(g.ny), rng.below(g.num_layers())};
    if (f.is_free(c)) {
      std::optional<int> h;
      if (rng.below(3) == 0) h = rng.below(8);
      return {c, h};
    }
  }
}

}  // namespace

TEST_CASE("plans are Bellman consistent and match the oracle on random fields") {
  auvplan::testing::SplitMix rng{8675309};
  for (int trial = 0; trial < 25; ++trial) {
    auto f = random_field(rng, 2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(3), 4);
    const GoalSpec goal = random_goal(rng, f);
    KinematicsConfig k = kin(1000.0 / rng.uniform(0.25, 1.0), rng.below(3) != 0);
    k.strict_paper_displacement = rng.below(4) == 0;
    const Planned p(std::move(f), k, goal);
    CHECK(check_bellman(p.graph, p.plan).empty());

    std::vector<StateIndex> all(p.plan.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<StateIndex>(i);
    CHECK(check_oracle(p.graph, p.model.lattice(), p.plan, all).empty());

    for (StateIndex z = 0; z < p.plan.size(); ++z) {
      const bool free = p.model.lattice().is_free(z);
      if (!free) CHECK_FALSE(p.plan.reachable(z));
      // action_of is defined exactly on reachable non-goal states.
      CHECK(p.plan.action_of[z].has_value() == (p.plan.reachable(z) && !p.plan.is_goal(z)));
    }
  }
}

TEST_CASE("worst-case plans are Bellman consistent and never cheaper than optimistic") {
  auvplan::testing::SplitMix rng{4242};
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_field(rng, 2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(2), 5);
    const GoalSpec goal = random_goal(rng, f);
    const KinematicsConfig k = kin(1000.0 / rng.uniform(0.25, 1.0));
    const TransitionModel m(f, k);
    const PlanningGraph graph = build_graph(m, {});
    const auto opt = compute_feedback_plan(graph, m.lattice(), goal);
    const auto worst = compute_feedback_plan(graph, m.lattice(), goal, OutcomeSemantics::WorstCase);
    CHECK(check_bellman(graph, worst).empty());
    for (StateIndex z = 0; z < opt.size(); ++z) {
      CHECK(worst.cost_to_go[z] >= opt.cost_to_go[z]);
      if (worst.reachable(z)) CHECK(opt.reachable(z));
    }
  }
}

TEST_CASE("worst-case valuation takes the most expensive member") {
  // Forward east from (1,1) in still water may slip to (2,0) or (2,2).
  const auto f = uniform_field(geometry(3, 3, 1), 0, 0);
  const TransitionModel m(f, kin(2000.0));
  const PlanningGraph graph = build_graph(m, {});
  const auto opt = compute_feedback_plan(graph, m.lattice(), {{2, 1, 0}, std::nullopt});
  const auto worst = compute_feedback_plan(graph, m.lattice(), {{2, 1, 0}, std::nullopt},
                                           OutcomeSemantics::WorstCase);
  const StateIndex z = m.lattice().encode({1, 1, 0, 0});
  CHECK(opt.cost_to_go[z] == 4);
  CHECK(worst.cost_to_go[z] > 4);
}

TEST_CASE("scaling all costs scales cost-to-go and keeps actions") {
  auvplan::testing::SplitMix rng{1234};
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_field(rng, 2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(3), 5);
    const GoalSpec goal = random_goal(rng, f);
    const TransitionModel m(f, kin(1500.0));
    const Cost k = 1 + rng.below(7);
    for (auto sem : {OutcomeSemantics::Optimistic, OutcomeSemantics::WorstCase}) {
      const auto base = compute_feedback_plan(build_graph(m, {}), m.lattice(), goal, sem);
      const auto scaled = compute_feedback_plan(build_graph(m, CostSet{}.scaled(k)), m.lattice(), goal, sem);
      CHECK(scaled.action_of == base.action_of);
      CHECK(scaled.steps_to_go == base.steps_to_go);
      for (StateIndex z = 0; z < base.size(); ++z) {
        if (base.reachable(z)) CHECK(scaled.cost_to_go[z] == k * base.cost_to_go[z]);
        else CHECK_FALSE(scaled.reachable(z));
      }
    }
  }
}

TEST_CASE("greedy execution strictly descends the (cost, steps) label") {
  auvplan::testing::SplitMix rng{777};
  for (int trial = 0; trial < 15; ++trial) {
    auto f = random_field(rng, 2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(3), 5);
    const GoalSpec goal = random_goal(rng, f);
    const Planned p(std::move(f), kin(1000.0 / rng.uniform(0.3, 1.0)), goal);
    for (StateIndex z = 0; z < p.plan.size(); ++z) {
      if (!p.plan.reachable(z) || p.plan.is_goal(z)) continue;
      const Edge* e = p.graph.find_edge(z, *p.plan.action_of[z]);
      REQUIRE(e != nullptr);
      const StateIndex next = preferred_outcome(p.plan, p.graph.outcomes(*e));
      CHECK(p.plan.cost_to_go[next] <= p.plan.cost_to_go[z]);
      CHECK(p.plan.cost_to_go[next] + e->weight == p.plan.cost_to_go[z]);
      CHECK(p.plan.steps_to_go[next] + 1 == p.plan.steps_to_go[z]);
    }
  }
}

TEST_CASE("corrupting one cost is detected at that index") {
  const Planned p(uniform_field(geometry(4, 4, 1), 0.3, -0.2), kin(2000.0), {{3, 3, 0}, std::nullopt});
  FeedbackPlan bad = p.plan;
  const StateIndex z = p.z({0, 0, 0, 4});
  REQUIRE(bad.reachable(z));
  bad.cost_to_go[z] += 1;
  const auto v = check_bellman(p.graph, bad);
  REQUIRE_FALSE(v.empty());
  bool found = false;
  for (const auto& x : v) found |= x.index == z;
  CHECK(found);
  const std::vector<StateIndex> starts{z};
  CHECK(check_oracle(p.graph, p.model.lattice(), bad, starts).size() == 1);

  FeedbackPlan wrong_action = p.plan;
  const StateIndex y = p.z({0, 0, 0, 0});
  wrong_action.action_of[y] = is_rotation(*p.plan.action_of[y]) ? Action::Drift : Action::RotateLeft;
  CHECK_FALSE(check_bellman(p.graph, wrong_action).empty());
}

TEST_CASE("semantics names") {
  CHECK(parse_semantics("worst_case") == OutcomeSemantics::WorstCase);
  CHECK(semantics_name(OutcomeSemantics::Optimistic) == "optimistic");
  CHECK_THROWS_AS(parse_semantics("pessimistic"), ValidationError);
}

TEST_CASE("land redirection can open a shortcut") {
  // Facing west at (2,1), the goal (1,0) needs a turn to south-west: 14.
  // With (1,1) as land, Forward west is redirected to the nearest free cell
  // with the smallest row, which is the goal itself: 4.
  const auto g = geometry(3, 3, 1);
  const GoalSpec goal{{1, 0, 0}, std::nullopt};
  const Planned open(uniform_field(g, 0, 0), kin(2000.0, false), goal);
  const Planned walled(uniform_field(g, 0, 0, {{1, 1, 0}}), kin(2000.0, false), goal);
  const State s{2, 1, 0, 4};
  CHECK(open.plan.cost_to_go[open.z(s)] == 14);
  CHECK(walled.plan.cost_to_go[walled.z(s)] == 4);
  CHECK(walled.model.lattice().decode(walled.model.successors(s, Action::Forward).nominal).cell() ==
        Cell{1, 0, 0});
}

namespace {

// Copy of `g` with the masked states deleted: their edges go, and they are
// dropped from every outcome set. Edges left without outcomes go too.
PlanningGraph without_states(const PlanningGraph& g, const std::vector<std::uint8_t>& masked) {
  std::vector<std::uint32_t> offsets(g.state_count() + 1, 0);
  std::vector<Edge> edges;
  std::vector<StateIndex> targets;
  for (StateIndex z = 0; z < g.state_count(); ++z) {
    offsets[z] = static_cast<std::uint32_t>(edges.size());
    if (masked[z]) continue;
    for (const Edge& e : g.edges_of(z)) {
      Edge copy = e;
      copy.first = static_cast<std::uint32_t>(targets.size());
      for (StateIndex t : g.outcomes(e))
        if (!masked[t]) targets.push_back(t);
      copy.count = static_cast<std::uint32_t>(targets.size()) - copy.first;
      if (copy.count > 0) edges.push_back(copy);
    }
  }
  offsets[g.state_count()] = static_cast<std::uint32_t>(edges.size());
  return PlanningGraph(g.state_count(), g.costs(), std::move(offsets), std::move(edges),
                       std::move(targets));
}

}  // namespace

TEST_CASE("blocking cells in the planning graph never decreases cost-to-go") {
  auvplan::testing::SplitMix rng{60601};
  for (int trial = 0; trial < 40; ++trial) {
    auto f = random_field(rng, 3 + rng.below(6), 3 + rng.below(6), 1 + rng.below(3), 6);
    const GoalSpec goal = random_goal(rng, f);
    const Planned p(std::move(f), kin(1000.0 / rng.uniform(0.3, 1.0), rng.below(2) == 0), goal);
    const Lattice& lat = p.model.lattice();

    std::vector<std::uint8_t> masked(p.plan.size(), 0);
    const int blocks = 1 + rng.below(4);
    for (int k = 0; k < blocks; ++k) {
      const State s = lat.decode(static_cast<StateIndex>(rng.below(static_cast<int>(p.plan.size()))));
      if (s.cell() == goal.cell) continue;
      for (int h = 0; h < kHeadingCount; ++h) masked[((s.layer * lat.ny() + s.iy) * lat.nx() + s.ix) * 8 + h] = 1;
    }
    const PlanningGraph blocked = without_states(p.graph, masked);
    const FeedbackPlan after = compute_feedback_plan(blocked, lat, goal);
    CHECK(check_bellman(blocked, after).empty());
    for (StateIndex z = 0; z < p.plan.size(); ++z) {
      if (masked[z]) {
        CHECK_FALSE((after.reachable(z) && !after.is_goal(z)));
        continue;
      }
      CHECK(after.cost_to_go[z] >= p.plan.cost_to_go[z]);
    }
  }
}
