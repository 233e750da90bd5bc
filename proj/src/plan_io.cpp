#include "auvplan/plan_io.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "auvplan/error.hpp"
#include "auvplan/field_io.hpp"
#include "auvplan/text_util.hpp"

namespace auvplan {
namespace {

constexpr int kPlanFormatVersion = 1;
constexpr std::string_view kColumns = "index ix iy layer heading_deg action cost_to_go steps_to_go";

std::string depths_text(const GridGeometry& g) {
  std::string out;
  for (std::size_t i = 0; i < g.layer_depths.size(); ++i) {
    if (i) out += ',';
    out += text::format_double(g.layer_depths[i]);
  }
  return out;
}

std::string tie_break_text() {
  std::string out;
  for (std::size_t i = 0; i < kActionsByPriority.size(); ++i) {
    if (i) out += " < ";
    out += action_name(kActionsByPriority[i]);
  }
  return out;
}

void write_stamp(std::ostream& out, const PlanDocument& doc) {
  out << "# heading_convention heading_deg = 45 * h, counterclockwise from east\n";
  out << "# field_hash " << doc.field_hash << "\n";
  out << "# config_hash " << doc.config_hash << "\n";
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("plan line " + std::to_string(line) + ": " + what);
}

GridGeometry parse_geometry(int line, std::string_view rest) {
  GridGeometry g;
  bool nx = false, ny = false, size = false, depths = false;
  for (auto token : text::split_ws(rest)) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) fail(line, "bad geometry token");
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "nx") {
      const auto v = text::parse_number<int>(value);
      if (!v) fail(line, "bad nx");
      g.nx = *v;
      nx = true;
    } else if (key == "ny") {
      const auto v = text::parse_number<int>(value);
      if (!v) fail(line, "bad ny");
      g.ny = *v;
      ny = true;
    } else if (key == "cell_size_m") {
      const auto v = text::parse_number<double>(value);
      if (!v) fail(line, "bad cell_size_m");
      g.cell_size = *v;
      size = true;
    } else if (key == "layer_depths_m") {
      std::size_t pos = 0;
      while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const auto part = value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos);
        const auto v = text::parse_number<double>(part);
        if (!v) fail(line, "bad layer_depths_m");
        g.layer_depths.push_back(*v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
      depths = true;
    }
  }
  if (!nx || !ny || !size || !depths) fail(line, "incomplete geometry line");
  try {
    g.validate();
  } catch (const ValidationError& e) {
    fail(line, e.what());
  }
  return g;
}

}  // namespace

PlanDocument make_plan_document(const FlowField& field, const PlannerConfig& config) {
  config.validate();
  const TransitionModel model(field, config.kinematics(field.geometry()));
  const PlanningGraph graph = build_graph(model, config.costs);
  PlanDocument doc;
  doc.geometry = field.geometry();
  doc.geometry.origin.reset();
  doc.config = config;
  doc.field_hash = field_fingerprint(field);
  doc.config_hash = config_hash(doc.field_hash, config);
  doc.land = field.land();
  doc.plan = compute_feedback_plan(graph, model.lattice(), config.goal(), config.semantics);
  return doc;
}

void write_plan(std::ostream& out, const PlanDocument& doc) {
  const GridGeometry& g = doc.geometry;
  const FeedbackPlan& plan = doc.plan;
  if (plan.size() != g.cell_count() * kHeadingCount || doc.land.size() != g.cell_count())
    throw ValidationError("plan document arrays do not match its geometry");

  out << "# auvplan feedback plan\n";
  out << "# format_version " << kPlanFormatVersion << "\n";
  write_stamp(out, doc);
  out << "# tie_break " << tie_break_text() << "\n";
  out << "# geometry nx=" << g.nx << " ny=" << g.ny
      << " cell_size_m=" << text::format_double(g.cell_size) << " layer_depths_m=" << depths_text(g)
      << "\n";
  std::istringstream canonical(doc.config.canonical());
  for (std::string line; std::getline(canonical, line);) out << "# config " << line << "\n";
  out << kColumns << "\n";

  std::size_t z = 0;
  std::size_t cell = 0;
  for (int l = 0; l < g.num_layers(); ++l) {
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix, ++cell) {
        for (int h = 0; h < kHeadingCount; ++h, ++z) {
          out << z << ' ' << ix << ' ' << iy << ' ' << l << ' ' << heading_degrees(h) << ' ';
          if (doc.land[cell]) out << "LAND - -\n";
          else if (plan.goal_mask[z]) out << "AT_GOAL 0 0\n";
          else if (plan.action_of[z])
            out << action_name(*plan.action_of[z]) << ' ' << plan.cost_to_go[z] << ' '
                << plan.steps_to_go[z] << "\n";
          else out << "UNREACHABLE - -\n";
        }
      }
    }
  }
}

void write_plan_file(const std::filesystem::path& path, const PlanDocument& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write plan file " + path.string());
  write_plan(out, doc);
}

PlanDocument read_plan(std::istream& in) {
  PlanDocument doc;
  std::optional<GridGeometry> geometry;
  bool have_version = false;
  std::string raw;
  int line_no = 0;

  // Header.
  while (true) {
    if (!std::getline(in, raw)) throw ParseError("plan file ended before the column line");
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    if (line == kColumns) break;
    if (line.front() != '#') fail(line_no, "expected a header line or the column line");
    const auto body = text::trim(line.substr(1));
    const auto space = body.find(' ');
    const auto key = body.substr(0, space);
    const auto rest = space == std::string_view::npos ? std::string_view{} : text::trim(body.substr(space + 1));
    if (key == "format_version") {
      if (text::parse_number<int>(rest) != kPlanFormatVersion)
        fail(line_no, "unsupported plan format_version '" + std::string(rest) + "'");
      have_version = true;
    } else if (key == "geometry") {
      geometry = parse_geometry(line_no, rest);
    } else if (key == "field_hash") {
      doc.field_hash = std::string(rest);
    } else if (key == "config_hash") {
      doc.config_hash = std::string(rest);
    } else if (key == "config") {
      const auto eq = rest.find('=');
      if (eq == std::string_view::npos) fail(line_no, "config line must be key=value");
      try {
        doc.config.set(rest.substr(0, eq), rest.substr(eq + 1));
      } catch (const ParseError& e) {
        fail(line_no, e.what());
      }
    }
  }
  if (!have_version || !geometry || doc.field_hash.empty() || doc.config_hash.empty())
    throw ParseError("plan header must carry format_version, geometry, field_hash and config_hash");
  doc.geometry = *geometry;
  doc.config.validate();
  if (config_hash(doc.field_hash, doc.config) != doc.config_hash)
    throw ValidationError("plan config_hash does not match its field hash and config");

  const GridGeometry& g = doc.geometry;
  const std::size_t n = g.cell_count() * kHeadingCount;
  FeedbackPlan& plan = doc.plan;
  plan.goal = doc.config.goal();
  plan.semantics = doc.config.semantics;
  plan.costs = doc.config.costs;
  plan.action_of.assign(n, std::nullopt);
  plan.cost_to_go.assign(n, kUnreachable);
  plan.steps_to_go.assign(n, kNoSteps);
  plan.goal_mask.assign(n, 0);
  doc.land.assign(g.cell_count(), 0);

  std::size_t z = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = text::split_ws(raw);
    if (tokens.empty()) continue;
    if (z >= n) fail(line_no, "more rows than the geometry has states");
    if (tokens.size() != 8) fail(line_no, "expected 8 columns");

    const std::size_t cell = z / kHeadingCount;
    const int h = static_cast<int>(z % kHeadingCount);
    const int ix = static_cast<int>(cell % g.nx);
    const int iy = static_cast<int>((cell / g.nx) % g.ny);
    const int l = static_cast<int>(cell / g.cells_per_layer());
    if (text::parse_number<std::size_t>(tokens[0]) != z || text::parse_number<int>(tokens[1]) != ix ||
        text::parse_number<int>(tokens[2]) != iy || text::parse_number<int>(tokens[3]) != l ||
        text::parse_number<int>(tokens[4]) != heading_degrees(h))
      fail(line_no, "row does not match state index " + std::to_string(z));

    const auto action = tokens[5];
    if (action == "LAND" || action == "UNREACHABLE") {
      if (tokens[6] != "-" || tokens[7] != "-") fail(line_no, "unreachable rows carry '-' costs");
      if (action == "LAND") {
        if (h == 0) doc.land[cell] = 1;
        else if (!doc.land[cell]) fail(line_no, "land flag differs between headings of one cell");
      }
    } else {
      const auto cost = text::parse_number<Cost>(tokens[6]);
      const auto steps = text::parse_number<std::uint32_t>(tokens[7]);
      if (!cost || !steps || *cost < 0) fail(line_no, "bad cost_to_go or steps_to_go");
      plan.cost_to_go[z] = *cost;
      plan.steps_to_go[z] = *steps;
      if (action == "AT_GOAL") {
        plan.goal_mask[z] = 1;
      } else {
        const auto a = parse_action(action);
        if (!a) fail(line_no, "unknown action '" + std::string(action) + "'");
        plan.action_of[z] = *a;
      }
    }
    if (h > 0 && doc.land[cell] && action != "LAND")
      fail(line_no, "land flag differs between headings of one cell");
    ++z;
  }
  if (z != n)
    throw ParseError("plan has " + std::to_string(z) + " rows, geometry needs " + std::to_string(n));
  return doc;
}

PlanDocument read_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file " + path.string());
  return read_plan(in);
}

void require_matching_field(const PlanDocument& doc, const FlowField& field) {
  const std::string actual = field_fingerprint(field);
  if (actual != doc.field_hash) {
    throw ValidationError("field hash mismatch: plan was computed for field " + doc.field_hash +
                          ", got " + actual);
  }
}

void write_quiver(std::ostream& out, const PlanDocument& doc, const TransitionModel& model,
                  int layer, int heading) {
  const GridGeometry& g = doc.geometry;
  if (layer < 0 || layer >= g.num_layers()) throw ValidationError("quiver layer out of range");
  if (heading < 0 || heading >= kHeadingCount) throw ValidationError("quiver heading out of range");
  const Lattice& lattice = model.lattice();
  const FeedbackPlan& plan = doc.plan;

  out << "# auvplan quiver: planned action per free cell\n";
  write_stamp(out, doc);
  out << "# slice layer=" << layer << " heading_deg=" << heading_degrees(heading) << "\n";
  out << "# glyphs: ARROW, GLIDE_UP, GLIDE_DOWN point along dx/dy (cells); CURL_LEFT, CURL_RIGHT "
         "rotate in place; GOAL; NONE (unreachable)\n";
  out << "ix iy x_m y_m action glyph dx_cells dy_cells cost_to_go\n";

  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Cell c{ix, iy, layer};
      if (!lattice.is_free(c)) continue;
      const State s{ix, iy, layer, heading};
      const StateIndex z = lattice.encode(s);
      out << ix << ' ' << iy << ' ' << text::format_double(ix * g.cell_size) << ' '
          << text::format_double(iy * g.cell_size) << ' ';
      if (plan.is_goal(z)) {
        out << "AT_GOAL GOAL 0 0 0\n";
        continue;
      }
      if (!plan.action_of[z]) {
        out << "UNREACHABLE NONE 0 0 -\n";
        continue;
      }
      const Action a = *plan.action_of[z];
      std::string_view glyph = "ARROW";
      int dx = 0, dy = 0;
      if (a == Action::RotateLeft) glyph = "CURL_LEFT";
      else if (a == Action::RotateRight) glyph = "CURL_RIGHT";
      else {
        if (a == Action::Up) glyph = "GLIDE_UP";
        if (a == Action::Down) glyph = "GLIDE_DOWN";
        const State to = lattice.decode(model.successors(s, a).nominal);
        dx = to.ix - ix;
        dy = to.iy - iy;
      }
      out << action_name(a) << ' ' << glyph << ' ' << dx << ' ' << dy << ' ' << plan.cost_to_go[z]
          << "\n";
    }
  }
}

}  // namespace auvplan
