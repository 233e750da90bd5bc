#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "auvplan/flowfield.hpp"

namespace auvplan {

/// Headings are h * 45 degrees, counterclockwise from east.
inline constexpr int kHeadingCount = 8;

struct State {
  int ix = 0;
  int iy = 0;
  int layer = 0;
  int heading = 0;  ///< 0..7

  Cell cell() const { return {ix, iy, layer}; }
  auto operator<=>(const State&) const = default;
};

using StateIndex = std::uint32_t;

double heading_radians(int heading);
int heading_degrees(int heading);
/// Accepts any multiple of 45 degrees (negative and >= 360 wrap); throws otherwise.
int heading_from_degrees(double degrees);

struct GoalSpec {
  Cell cell;
  std::optional<int> heading;  ///< nullopt: any heading over the goal cell

  bool operator==(const GoalSpec&) const = default;
};

/// Indexing of the state space: heading fastest, then ix, iy, layer.
/// Land states occupy indices but are not valid states.
class Lattice {
 public:
  explicit Lattice(const FlowField& field);

  std::size_t size() const { return size_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_layers() const { return layers_; }

  bool in_bounds(const Cell& c) const;
  bool is_free(const Cell& c) const;  ///< false for out-of-bounds cells
  bool is_free(StateIndex z) const;

  StateIndex encode(const State& s) const;  ///< throws OutOfBounds / ValidationError (land)
  State decode(StateIndex z) const;         ///< throws OutOfBounds

  /// Sorted. Throws ValidationError when the goal cell is land or out of bounds.
  std::vector<StateIndex> goal_states(const GoalSpec& goal) const;

 private:
  int nx_;
  int ny_;
  int layers_;
  std::size_t size_;
  std::vector<std::uint8_t> land_;
};

}  // namespace auvplan
