#include "auvplan/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "auvplan/error.hpp"

namespace auvplan {
namespace {

std::string describe(const Cell& c) {
  std::ostringstream os;
  os << "(" << c.ix << ", " << c.iy << ", layer " << c.layer << ")";
  return os.str();
}

// Nearest index to t along one axis; exact half-way ties go to the smaller index.
int nearest_index(double t, int n) {
  const double k = std::ceil(t - 0.5);
  if (k < 0.0) return 0;
  if (k > static_cast<double>(n - 1)) return n - 1;
  return static_cast<int>(k);
}

}  // namespace

void GridGeometry::validate() const {
  if (nx < 1 || ny < 1) throw ValidationError("grid must have nx >= 1 and ny >= 1");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw ValidationError("cell_size must be positive and finite");
  if (layer_depths.empty()) throw ValidationError("at least one layer is required");
  for (std::size_t l = 0; l < layer_depths.size(); ++l) {
    if (!std::isfinite(layer_depths[l])) throw ValidationError("layer depth is not finite");
    if (l > 0 && !(layer_depths[l] > layer_depths[l - 1]))
      throw ValidationError("layer depths must be strictly increasing");
  }
}

FlowField::FlowField(GridGeometry geometry, std::vector<double> u, std::vector<double> v,
                     std::vector<std::uint8_t> land)
    : geometry_(std::move(geometry)), u_(std::move(u)), v_(std::move(v)), land_(std::move(land)) {
  geometry_.validate();
  const std::size_t n = geometry_.cell_count();
  if (u_.size() != n || v_.size() != n || land_.size() != n)
    throw ValidationError("flow field array sizes do not match the grid geometry");
  for (std::size_t i = 0; i < n; ++i) {
    if (land_[i] > 1) throw ValidationError("land mask values must be 0 or 1");
    if (!land_[i] && (!std::isfinite(u_[i]) || !std::isfinite(v_[i])))
      throw ValidationError("non-finite velocity on a free cell");
  }
}

bool FlowField::contains(const Cell& c) const {
  return c.ix >= 0 && c.ix < geometry_.nx && c.iy >= 0 && c.iy < geometry_.ny && c.layer >= 0 &&
         c.layer < geometry_.num_layers();
}

std::size_t FlowField::flat_index(const Cell& c) const {
  if (!contains(c)) throw OutOfBounds("cell " + describe(c) + " is outside the grid");
  return (static_cast<std::size_t>(c.layer) * geometry_.ny + c.iy) * geometry_.nx + c.ix;
}

bool FlowField::is_land(const Cell& c) const { return land_[flat_index(c)] != 0; }

std::size_t FlowField::free_cell_count() const {
  return static_cast<std::size_t>(std::count(land_.begin(), land_.end(), std::uint8_t{0}));
}

Velocity FlowField::flow_at(const Cell& c) const {
  const std::size_t i = flat_index(c);
  return {u_[i], v_[i]};
}

Position FlowField::center_of(const Cell& c) const {
  return {c.ix * geometry_.cell_size, c.iy * geometry_.cell_size, c.layer};
}

Cell FlowField::containing_cell(const Position& p) const {
  const double s = geometry_.cell_size;
  return {static_cast<int>(std::floor(p.x / s + 0.5)), static_cast<int>(std::floor(p.y / s + 0.5)),
          p.layer};
}

Cell FlowField::nearest_free_cell(int layer, double x, double y) const {
  const double s = geometry_.cell_size;
  const Cell clamped{nearest_index(x / s, geometry_.nx), nearest_index(y / s, geometry_.ny), layer};
  if (!is_land(clamped)) return clamped;

  // Row-major scan with strict comparison keeps the smallest (iy, ix) on ties.
  std::optional<Cell> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < geometry_.ny; ++iy) {
    for (int ix = 0; ix < geometry_.nx; ++ix) {
      const Cell c{ix, iy, layer};
      if (land_[flat_index(c)]) continue;
      const double dx = ix * s - x;
      const double dy = iy * s - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
  }
  if (!best) throw ValidationError("layer " + std::to_string(layer) + " has no free cell");
  return *best;
}

double default_time_step(const GridGeometry& geometry, double reference_speed) {
  if (!(reference_speed > 0.0) || !std::isfinite(reference_speed))
    throw ValidationError("reference speed must be positive");
  return geometry.cell_size / reference_speed;
}

Position euler_step(const FlowField& field, const Position& p, double dt) {
  const Velocity f = field.flow_at(field.containing_cell(p));
  return {p.x + dt * f.east, p.y + dt * f.north, p.layer};
}

Cell map_cell(const FlowField& field, const Cell& cell, double dt) {
  if (field.is_land(cell)) throw ValidationError("map_cell called on land cell " + describe(cell));
  const Position end = euler_step(field, field.center_of(cell), dt);
  return field.nearest_free_cell(cell.layer, end.x, end.y);
}

std::vector<Cell> trace_flow_line(const FlowField& field, const Cell& start, double dt,
                                  int max_steps) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  std::vector<Cell> line{start};
  Cell current = start;
  for (int step = 0; step < max_steps; ++step) {
    const Cell next = map_cell(field, current, dt);
    if (next == current) break;
    line.push_back(next);
    current = next;
  }
  return line;
}

}  // namespace auvplan
