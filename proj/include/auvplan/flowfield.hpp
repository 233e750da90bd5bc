#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace auvplan {

/// Geographic position of the center of cell (0,0). Metadata only; all
/// computation happens in meters on a local planar projection.
struct GeoOrigin {
  double longitude_deg = 0.0;
  double latitude_deg = 0.0;
  bool operator==(const GeoOrigin&) const = default;
};

struct GridGeometry {
  int nx = 0;
  int ny = 0;
  double cell_size = 0.0;  ///< meters per cell edge
  std::vector<double> layer_depths;  ///< meters, strictly increasing from the surface
  std::optional<GeoOrigin> origin;

  int num_layers() const { return static_cast<int>(layer_depths.size()); }
  std::size_t cells_per_layer() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t cell_count() const {
    return cells_per_layer() * layer_depths.size();
  }

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;

  bool operator==(const GridGeometry&) const = default;
};

/// A grid cell on one current layer.
struct Cell {
  int ix = 0;
  int iy = 0;
  int layer = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Meters east/north of the (0,0) cell center, on a given layer.
struct Position {
  double x = 0.0;
  double y = 0.0;
  int layer = 0;
  bool operator==(const Position&) const = default;
};

/// Horizontal current in m/s. The vertical component is identically zero
/// and is not represented.
struct Velocity {
  double east = 0.0;
  double north = 0.0;
  bool operator==(const Velocity&) const = default;
};

/// Layered, cell-constant current field with a land mask. Arrays are stored
/// layer-major, then row (south to north), then column (west to east).
/// Immutable after construction.
class FlowField {
 public:
  FlowField(GridGeometry geometry, std::vector<double> u, std::vector<double> v,
            std::vector<std::uint8_t> land);

  const GridGeometry& geometry() const { return geometry_; }

  bool contains(const Cell& c) const;
  std::size_t flat_index(const Cell& c) const;  ///< throws OutOfBounds
  bool is_land(const Cell& c) const;            ///< throws OutOfBounds
  bool is_free(const Cell& c) const { return !is_land(c); }
  std::size_t free_cell_count() const;

  /// Stored current at a cell. Land cells still return their stored value.
  Velocity flow_at(const Cell& c) const;

  Position center_of(const Cell& c) const;

  /// Cell whose square contains `p`. May lie outside the grid.
  Cell containing_cell(const Position& p) const;

  /// Grid cell nearest to (x, y) on `layer`, clamped to the grid; when that
  /// cell is land, the nearest free cell instead. Ties go to the smallest
  /// (iy, ix). Throws ValidationError if the layer has no free cell.
  Cell nearest_free_cell(int layer, double x, double y) const;

  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& v() const { return v_; }
  const std::vector<std::uint8_t>& land() const { return land_; }

 private:
  GridGeometry geometry_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<std::uint8_t> land_;
};

/// Time to pass one cell at `reference_speed` m/s.
double default_time_step(const GridGeometry& geometry, double reference_speed = 0.5);

/// One explicit Euler step p + dt * F(p), F sampled at the containing cell.
Position euler_step(const FlowField& field, const Position& p, double dt);

/// Advects the cell center for `dt` and snaps to the nearest free cell.
Cell map_cell(const FlowField& field, const Cell& cell, double dt);

/// Repeated map_cell from `start`; stops at a fixed point or after
/// `max_steps` applications. The result always begins with `start`.
std::vector<Cell> trace_flow_line(const FlowField& field, const Cell& start, double dt,
                                  int max_steps);

}  // namespace auvplan
