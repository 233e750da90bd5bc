#include "auvplan/simulator.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "auvplan/error.hpp"
#include "parallel.hpp"

namespace auvplan {
namespace {

std::mt19937_64 rollout_stream(std::uint64_t seed, StateIndex start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start)};
  return std::mt19937_64(seq);
}

// Draws from the raw engine output so streams are identical across standard
// library implementations.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void DisturbanceConfig::validate() const {
  if (!(dispersal_probability >= 0.0 && dispersal_probability <= 1.0))
    throw ValidationError("dispersal probability must lie in [0, 1]");
}

std::string_view terminal_name(Terminal t) {
  switch (t) {
    case Terminal::ReachedGoal: return "REACHED_GOAL";
    case Terminal::StepLimit: return "STEP_LIMIT";
    case Terminal::Stuck: return "STUCK";
  }
  return "?";
}

Trajectory rollout(const FeedbackPlan& plan, const TransitionModel& model, const State& start,
                   const DisturbanceConfig& disturbance, int max_steps) {
  disturbance.validate();
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  const Lattice& lattice = model.lattice();
  if (lattice.size() != plan.size()) throw ValidationError("plan does not match the field lattice");

  Trajectory t;
  t.start = start;
  StateIndex z = lattice.encode(start);
  auto rng = rollout_stream(disturbance.seed, z);
  State current = start;
  Cost energy = 0;

  while (true) {
    if (plan.is_goal(z)) {
      t.terminal = Terminal::ReachedGoal;
      break;
    }
    if (!plan.reachable(z) || !plan.action_of[z]) {
      t.terminal = Terminal::Stuck;
      break;
    }
    if (static_cast<int>(t.steps.size()) >= max_steps) {
      t.terminal = Terminal::StepLimit;
      break;
    }

    const Action a = *plan.action_of[z];
    OutcomeSet outcome = model.successors(current, a);
    StateIndex next = preferred_outcome(plan, outcome.members);
    const std::size_t k = outcome.members.size();
    if (k > 1 && disturbance.dispersal_probability > 0.0 &&
        unit_draw(rng) < disturbance.dispersal_probability) {
      // Uniform over the other k - 1 members.
      std::size_t pick = static_cast<std::size_t>(rng() % (k - 1));
      for (StateIndex m : outcome.members) {
        if (m == next) continue;
        if (pick-- == 0) {
          next = m;
          break;
        }
      }
    }

    energy += action_cost(a, plan.costs);
    const State successor = lattice.decode(next);
    t.steps.push_back({current, a, std::move(outcome.members), successor, energy});
    current = successor;
    z = next;
  }
  return t;
}

BatchSummary batch_reachability(const FeedbackPlan& plan, const TransitionModel& model,
                                const DisturbanceConfig& disturbance, int max_steps) {
  disturbance.validate();
  const Lattice& lattice = model.lattice();
  std::vector<StateIndex> starts;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto z = static_cast<StateIndex>(i);
    if (lattice.is_free(z) && plan.reachable(z)) starts.push_back(z);
  }

  struct Result {
    Terminal terminal = Terminal::Stuck;
    Cost energy = 0;
    std::size_t steps = 0;
  };
  std::vector<Result> results(starts.size());
  detail::parallel_for(starts.size(), [&](std::size_t i) {
    const Trajectory t = rollout(plan, model, lattice.decode(starts[i]), disturbance, max_steps);
    results[i] = {t.terminal, t.energy(), t.steps.size()};
  });

  BatchSummary summary;
  summary.runs = results.size();
  double energy_sum = 0.0;
  double steps_sum = 0.0;
  for (const Result& r : results) {
    switch (r.terminal) {
      case Terminal::ReachedGoal:
        ++summary.reached;
        energy_sum += static_cast<double>(r.energy);
        steps_sum += static_cast<double>(r.steps);
        break;
      case Terminal::Stuck: ++summary.stuck; break;
      case Terminal::StepLimit: ++summary.step_limit; break;
    }
  }
  if (summary.runs > 0)
    summary.fraction_reached = static_cast<double>(summary.reached) / static_cast<double>(summary.runs);
  if (summary.reached > 0) {
    summary.mean_energy = energy_sum / static_cast<double>(summary.reached);
    summary.mean_steps = steps_sum / static_cast<double>(summary.reached);
  }
  return summary;
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << "# trajectory: heading_deg counterclockwise from east\n";
  out << "step ix iy layer heading_deg action energy_cum terminal\n";
  auto row = [&](std::size_t step, const State& s, std::string_view action, Cost energy,
                 std::string_view terminal) {
    out << step << ' ' << s.ix << ' ' << s.iy << ' ' << s.layer << ' ' << heading_degrees(s.heading)
        << ' ' << action << ' ' << energy << ' ' << terminal << "\n";
  };
  Cost energy = 0;
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    const auto& s = trajectory.steps[i];
    row(i, s.state, action_name(s.action), energy, "-");
    energy = s.energy;
  }
  row(trajectory.steps.size(), trajectory.final_state(), "-", energy,
      terminal_name(trajectory.terminal));
}

}  // namespace auvplan
