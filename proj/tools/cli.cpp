#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "auvplan/config.hpp"
#include "auvplan/error.hpp"
#include "auvplan/field_io.hpp"
#include "auvplan/plan_io.hpp"
#include "auvplan/planner.hpp"
#include "auvplan/simulator.hpp"
#include "auvplan/synthetic.hpp"
#include "auvplan/text_util.hpp"

namespace auvplan::cli {
namespace {

// Raised by command bodies to report a verification failure (exit 4).
struct VerificationFailed {};

// Writes to a file, or to `fallback` when the path is "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw ValidationError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

struct GenFieldArgs {
  std::string kind;
  int nx = 0;
  int ny = 0;
  int layers = 1;
  std::vector<double> depths;
  double cell_size = 1000.0;
  SyntheticParams params;
  std::optional<double> origin_lon;
  std::optional<double> origin_lat;
  std::string out = "-";
};

struct PlanArgs {
  std::string field;
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::string quiver;
  std::optional<int> layer;
  std::optional<double> heading_deg;
};

struct RolloutArgs {
  std::string plan;
  std::string field;
  int ix = 0;
  int iy = 0;
  int layer = 0;
  double heading_deg = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> max_steps;
  std::string out = "-";
};

struct VerifyArgs {
  std::string plan;
  std::string field;
  std::optional<std::size_t> oracle_samples;
  std::uint64_t seed = 0;
};

struct BatchArgs {
  std::string plan;
  std::string field;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> max_steps;
};

struct TraceArgs {
  std::string field;
  int ix = 0;
  int iy = 0;
  int layer = 0;
  std::optional<double> dt;
  std::optional<double> v_ref;
  int max_steps = 1000;
  std::string out = "-";
};

int cmd_gen_field(const GenFieldArgs& a, std::ostream& out) {
  GridGeometry g;
  g.nx = a.nx;
  g.ny = a.ny;
  g.cell_size = a.cell_size;
  if (a.depths.empty()) {
    if (a.layers < 1) throw ValidationError("--layers must be at least 1");
    for (int l = 0; l < a.layers; ++l) g.layer_depths.push_back(5.0 * l);
  } else {
    if (static_cast<int>(a.depths.size()) != a.layers && a.layers != 1)
      throw ValidationError("--depths must list one depth per layer");
    g.layer_depths = a.depths;
  }
  if (a.origin_lon.has_value() != a.origin_lat.has_value())
    throw ValidationError("--origin-lon and --origin-lat go together");
  if (a.origin_lon) g.origin = GeoOrigin{*a.origin_lon, *a.origin_lat};

  const FlowField field = generate_synthetic_field(parse_field_kind(a.kind), g, a.params);
  Sink sink(a.out, out);
  write_flow_field(*sink, field);
  return kSuccess;
}

PlannerConfig load_config(const PlanArgs& a) {
  PlannerConfig config;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw ParseError("cannot open config file " + a.config);
    config = parse_config(in);
  }
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'");
    config.set(text::trim(std::string_view(kv).substr(0, eq)),
               text::trim(std::string_view(kv).substr(eq + 1)));
  }
  config.validate();
  return config;
}

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const FlowField field = load_flow_field_file(a.field);
  PlannerConfig config = load_config(a);
  const PlanDocument doc = make_plan_document(field, config);
  write_plan_file(a.out, doc);

  const TransitionModel model(field, config.kinematics(field.geometry()));
  const int layer = a.layer.value_or(config.goal().cell.layer);
  const int heading = a.heading_deg ? heading_from_degrees(*a.heading_deg) : config.initial_heading;
  const std::string quiver_path = a.quiver.empty() ? a.out + ".quiver" : a.quiver;
  {
    std::ofstream q(quiver_path);
    if (!q) throw ValidationError("cannot write " + quiver_path);
    write_quiver(q, doc, model, layer, heading);
  }

  std::size_t reachable = 0, goals = 0;
  for (std::size_t z = 0; z < doc.plan.size(); ++z) {
    reachable += doc.plan.reachable(static_cast<StateIndex>(z));
    goals += doc.plan.is_goal(static_cast<StateIndex>(z));
  }
  out << "states " << doc.plan.size() << "\n"
      << "reachable " << reachable << "\n"
      << "goal_states " << goals << "\n"
      << "config_hash " << doc.config_hash << "\n"
      << "plan " << a.out << "\n"
      << "quiver " << quiver_path << " layer=" << layer
      << " heading_deg=" << heading_degrees(heading) << "\n";
  return kSuccess;
}

struct LoadedPlan {
  PlanDocument doc;
  FlowField field;
};

LoadedPlan load_plan_and_field(const std::string& plan_path, const std::string& field_path) {
  PlanDocument doc = read_plan_file(plan_path);
  FlowField field = load_flow_field_file(field_path);
  require_matching_field(doc, field);
  return {std::move(doc), std::move(field)};
}

int cmd_rollout(const RolloutArgs& a, std::ostream& out) {
  const auto [doc, field] = load_plan_and_field(a.plan, a.field);
  const TransitionModel model(field, doc.config.kinematics(field.geometry()));
  const State start{a.ix, a.iy, a.layer, heading_from_degrees(a.heading_deg)};
  const StateIndex z = model.lattice().encode(start);
  const int max_steps = a.max_steps.value_or(static_cast<int>(doc.plan.size()));
  const Trajectory t = rollout(doc.plan, model, start, {a.p, a.seed}, max_steps);

  Sink sink(a.out, out);
  write_trajectory(*sink, t);
  out << "# terminal=" << terminal_name(t.terminal) << " steps=" << t.steps.size()
      << " energy=" << t.energy() << " cost_to_go=";
  if (doc.plan.reachable(z)) out << doc.plan.cost_to_go[z];
  else out << "unreachable";
  out << "\n";

  switch (t.terminal) {
    case Terminal::ReachedGoal: return kSuccess;
    case Terminal::Stuck: return kRolloutStuck;
    case Terminal::StepLimit: return kRolloutStepLimit;
  }
  return kRolloutStuck;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto [doc, field] = load_plan_and_field(a.plan, a.field);
  const TransitionModel model(field, doc.config.kinematics(field.geometry()));
  const PlanningGraph graph = build_graph(model, doc.config.costs);
  const Lattice& lattice = model.lattice();
  const FeedbackPlan& plan = doc.plan;

  std::vector<Violation> violations;
  const auto goals = lattice.goal_states(plan.goal);
  for (std::size_t z = 0; z < plan.size(); ++z) {
    const bool expected = std::binary_search(goals.begin(), goals.end(), static_cast<StateIndex>(z));
    if (expected != plan.is_goal(static_cast<StateIndex>(z)))
      violations.push_back({static_cast<StateIndex>(z), "goal marking disagrees with the goal spec"});
  }
  auto bellman = check_bellman(graph, plan);
  out << "bellman_checked " << plan.size() << "\n";
  out << "bellman_violations " << bellman.size() << "\n";
  violations.insert(violations.end(), bellman.begin(), bellman.end());

  if (plan.semantics == OutcomeSemantics::Optimistic) {
    std::vector<StateIndex> free_states;
    for (std::size_t z = 0; z < plan.size(); ++z)
      if (lattice.is_free(static_cast<StateIndex>(z))) free_states.push_back(static_cast<StateIndex>(z));
    const std::size_t want =
        a.oracle_samples.value_or(free_states.size() <= 4096 ? free_states.size() : 256);
    std::vector<StateIndex> starts = free_states;
    if (want < starts.size()) {
      std::mt19937_64 rng(a.seed);
      for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (starts.size() - i));
        std::swap(starts[i], starts[j]);
      }
      starts.resize(want);
      std::sort(starts.begin(), starts.end());
    }
    auto oracle = check_oracle(graph, lattice, plan, starts);
    out << "oracle_samples " << starts.size() << "\n";
    out << "oracle_violations " << oracle.size() << "\n";
    violations.insert(violations.end(), oracle.begin(), oracle.end());
  } else {
    out << "oracle_samples 0 (oracle covers optimistic semantics only)\n";
  }

  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < violations.size() && i < kShown; ++i)
    out << "violation index=" << violations[i].index << ": " << violations[i].message << "\n";
  if (violations.size() > kShown) out << "... " << violations.size() - kShown << " more\n";
  out << (violations.empty() ? "verify OK\n" : "verify FAILED\n");
  if (!violations.empty()) throw VerificationFailed{};
  return kSuccess;
}

int cmd_batch(const BatchArgs& a, std::ostream& out) {
  const auto [doc, field] = load_plan_and_field(a.plan, a.field);
  const TransitionModel model(field, doc.config.kinematics(field.geometry()));
  const int max_steps = a.max_steps.value_or(static_cast<int>(4 * doc.plan.size()));
  const BatchSummary s = batch_reachability(doc.plan, model, {a.p, a.seed}, max_steps);

  out << "# disturbance: lateral dispersal with probability " << a.p
      << " (synthetic noise model), seed " << a.seed << ", max_steps " << max_steps << "\n";
  out << "runs " << s.runs << "\n";
  if (s.empty()) {
    out << "empty_reachable_set true\n";
    return kSuccess;
  }
  out << std::fixed << std::setprecision(3);
  out << "reached " << s.reached << "\n"
      << "stuck " << s.stuck << "\n"
      << "step_limit " << s.step_limit << "\n"
      << "fraction_reached " << s.fraction_reached << "\n"
      << "mean_energy " << s.mean_energy << "\n"
      << "mean_steps " << s.mean_steps << "\n";
  return kSuccess;
}

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  const FlowField field = load_flow_field_file(a.field);
  if (a.dt && a.v_ref) throw ValidationError("give at most one of --dt and --v-ref");
  const double dt = a.dt ? *a.dt : default_time_step(field.geometry(), a.v_ref.value_or(0.5));
  const auto line = trace_flow_line(field, {a.ix, a.iy, a.layer}, dt, a.max_steps);
  Sink sink(a.out, out);
  *sink << "# flow line, dt " << text::format_double(dt) << " s\n";
  *sink << "step ix iy layer x_m y_m\n";
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Position p = field.center_of(line[i]);
    *sink << i << ' ' << line[i].ix << ' ' << line[i].iy << ' ' << line[i].layer << ' '
          << text::format_double(p.x) << ' ' << text::format_double(p.y) << "\n";
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback motion planning for underwater vehicles in layered current fields"};
  app.require_subcommand(1);

  GenFieldArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-field", "Write a synthetic current field");
  gen_cmd->add_option("--kind", gen.kind, "uniform | double_gyre | rotational")->required();
  gen_cmd->add_option("--nx", gen.nx, "Cells east")->required();
  gen_cmd->add_option("--ny", gen.ny, "Cells north")->required();
  gen_cmd->add_option("--layers", gen.layers, "Layer count (depths 0, 5, 10, ... m)");
  gen_cmd->add_option("--depths", gen.depths, "Explicit layer depths in meters")->delimiter(',');
  gen_cmd->add_option("--cell-size", gen.cell_size, "Meters per cell edge");
  gen_cmd->add_option("--u", gen.params.u0, "uniform: east velocity (m/s)");
  gen_cmd->add_option("--v", gen.params.v0, "uniform: north velocity (m/s)");
  gen_cmd->add_option("--amplitude", gen.params.amplitude, "double_gyre: peak speed (m/s)");
  gen_cmd->add_option("--omega", gen.params.angular_rate, "rotational: angular rate (rad/s)");
  gen_cmd->add_option("--origin-lon", gen.origin_lon, "Longitude of cell (0,0)");
  gen_cmd->add_option("--origin-lat", gen.origin_lat, "Latitude of cell (0,0)");
  gen_cmd->add_option("--out", gen.out, "Output path, '-' for stdout");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Compute a feedback plan and its quiver slice");
  plan_cmd->add_option("--field", plan.field)->required();
  plan_cmd->add_option("--config", plan.config, "Planner config document");
  plan_cmd->add_option("--set", plan.overrides, "Override a config key (key=value)");
  plan_cmd->add_option("--out", plan.out, "Plan table output path")->required();
  plan_cmd->add_option("--quiver", plan.quiver, "Quiver output path (default <out>.quiver)");
  plan_cmd->add_option("--layer", plan.layer, "Quiver layer (default: goal layer)");
  plan_cmd->add_option("--heading-deg", plan.heading_deg, "Quiver heading slice");

  RolloutArgs roll;
  auto* roll_cmd = app.add_subcommand("rollout", "Execute a plan from one start state");
  roll_cmd->add_option("--plan", roll.plan)->required();
  roll_cmd->add_option("--field", roll.field)->required();
  roll_cmd->add_option("--start-ix", roll.ix)->required();
  roll_cmd->add_option("--start-iy", roll.iy)->required();
  roll_cmd->add_option("--start-layer,--layer", roll.layer);
  roll_cmd->add_option("--start-heading-deg,--heading-deg", roll.heading_deg);
  roll_cmd->add_option("--p", roll.p, "Dispersal probability");
  roll_cmd->add_option("--seed", roll.seed);
  roll_cmd->add_option("--max-steps", roll.max_steps, "Default: number of states");
  roll_cmd->add_option("--out", roll.out, "Trajectory output path, '-' for stdout");

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Re-check a plan file against its field");
  ver_cmd->add_option("--plan", ver.plan)->required();
  ver_cmd->add_option("--field", ver.field)->required();
  ver_cmd->add_option("--oracle-samples", ver.oracle_samples,
                      "Oracle start states (default: all when <= 4096 free states, else 256)");
  ver_cmd->add_option("--seed", ver.seed, "Sampling seed");

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "Roll out from every reachable state");
  batch_cmd->add_option("--plan", batch.plan)->required();
  batch_cmd->add_option("--field", batch.field)->required();
  batch_cmd->add_option("--p", batch.p, "Dispersal probability");
  batch_cmd->add_option("--seed", batch.seed);
  batch_cmd->add_option("--max-steps", batch.max_steps, "Default: 4 x number of states");

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "Trace one flow line");
  trace_cmd->add_option("--field", trace.field)->required();
  trace_cmd->add_option("--ix", trace.ix)->required();
  trace_cmd->add_option("--iy", trace.iy)->required();
  trace_cmd->add_option("--layer", trace.layer);
  trace_cmd->add_option("--dt", trace.dt, "Seconds per step");
  trace_cmd->add_option("--v-ref", trace.v_ref, "dt = cell_size / v_ref (default 0.5 m/s)");
  trace_cmd->add_option("--max-steps", trace.max_steps);
  trace_cmd->add_option("--out", trace.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_field(gen, out);
    if (plan_cmd->parsed()) return cmd_plan(plan, out);
    if (roll_cmd->parsed()) return cmd_rollout(roll, out);
    if (ver_cmd->parsed()) return cmd_verify(ver, out);
    if (batch_cmd->parsed()) return cmd_batch(batch, out);
    if (trace_cmd->parsed()) return cmd_trace(trace, out);
  } catch (const VerificationFailed&) {
    return kVerification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace auvplan::cli
