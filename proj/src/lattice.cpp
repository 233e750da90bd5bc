#include "auvplan/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "auvplan/error.hpp"

namespace auvplan {

double heading_radians(int heading) { return heading * (std::numbers::pi / 4.0); }

int heading_degrees(int heading) { return heading * 45; }

int heading_from_degrees(double degrees) {
  const double steps = degrees / 45.0;
  if (!std::isfinite(steps) || steps != std::floor(steps))
    throw ValidationError("heading must be a multiple of 45 degrees, got " + std::to_string(degrees));
  const int h = static_cast<int>(std::fmod(steps, kHeadingCount));
  return h < 0 ? h + kHeadingCount : h;
}

Lattice::Lattice(const FlowField& field)
    : nx_(field.geometry().nx),
      ny_(field.geometry().ny),
      layers_(field.geometry().num_layers()),
      size_(field.geometry().cell_count() * kHeadingCount),
      land_(field.land()) {}

bool Lattice::in_bounds(const Cell& c) const {
  return c.ix >= 0 && c.ix < nx_ && c.iy >= 0 && c.iy < ny_ && c.layer >= 0 && c.layer < layers_;
}

bool Lattice::is_free(const Cell& c) const {
  if (!in_bounds(c)) return false;
  return !land_[(static_cast<std::size_t>(c.layer) * ny_ + c.iy) * nx_ + c.ix];
}

bool Lattice::is_free(StateIndex z) const {
  return z < size_ && !land_[z / kHeadingCount];
}

StateIndex Lattice::encode(const State& s) const {
  const Cell c = s.cell();
  if (!in_bounds(c) || s.heading < 0 || s.heading >= kHeadingCount) {
    throw OutOfBounds("state (" + std::to_string(s.ix) + ", " + std::to_string(s.iy) + ", layer " +
                      std::to_string(s.layer) + ", heading " + std::to_string(s.heading) +
                      ") is outside the lattice");
  }
  if (!is_free(c)) {
    throw ValidationError("state cell (" + std::to_string(s.ix) + ", " + std::to_string(s.iy) +
                          ", layer " + std::to_string(s.layer) + ") is land");
  }
  const std::size_t cell = (static_cast<std::size_t>(c.layer) * ny_ + c.iy) * nx_ + c.ix;
  return static_cast<StateIndex>(cell * kHeadingCount + s.heading);
}

State Lattice::decode(StateIndex z) const {
  if (z >= size_)
    throw OutOfBounds("state index " + std::to_string(z) + " >= " + std::to_string(size_));
  State s;
  s.heading = static_cast<int>(z % kHeadingCount);
  std::size_t rest = z / kHeadingCount;
  s.ix = static_cast<int>(rest % nx_);
  rest /= nx_;
  s.iy = static_cast<int>(rest % ny_);
  s.layer = static_cast<int>(rest / ny_);
  return s;
}

std::vector<StateIndex> Lattice::goal_states(const GoalSpec& goal) const {
  const Cell& c = goal.cell;
  if (!is_free(c)) {
    throw ValidationError("goal cell (" + std::to_string(c.ix) + ", " + std::to_string(c.iy) +
                          ", layer " + std::to_string(c.layer) + ") is " +
                          (in_bounds(c) ? "land" : "outside the grid"));
  }
  if (goal.heading) {
    if (*goal.heading < 0 || *goal.heading >= kHeadingCount)
      throw ValidationError("goal heading index out of range");
    return {encode({c.ix, c.iy, c.layer, *goal.heading})};
  }
  std::vector<StateIndex> out;
  for (int h = 0; h < kHeadingCount; ++h) out.push_back(encode({c.ix, c.iy, c.layer, h}));
  return out;
}

}  // namespace auvplan
