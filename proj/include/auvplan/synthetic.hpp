#pragma once

#include <string_view>

#include "auvplan/flowfield.hpp"

namespace auvplan {

enum class FieldKind { Uniform, DoubleGyre, Rotational };

/// Kind-specific parameters; only the fields of the selected kind are read.
struct SyntheticParams {
  double u0 = 0.0;            ///< uniform: east velocity, m/s
  double v0 = 0.0;            ///< uniform: north velocity, m/s
  double amplitude = 0.0;     ///< double_gyre: peak speed A, m/s
  double angular_rate = 0.0;  ///< rotational: omega, rad/s (counterclockwise positive)
};

FieldKind parse_field_kind(std::string_view name);  ///< throws ValidationError
std::string_view field_kind_name(FieldKind kind);

/// Deterministic all-water field replicated on every layer.
///
/// Domain coordinates run from the south-west grid corner, so cell (ix, iy)
/// sits at ((ix + 0.5) * cell_size, (iy + 0.5) * cell_size) and the domain
/// spans W = nx * cell_size by H = ny * cell_size.
///  - uniform:     u = u0, v = v0
///  - double_gyre: u = -A sin(pi x / W) cos(pi y / H), v = A cos(pi x / W) sin(pi y / H)
///  - rotational:  u = -omega (y - H/2), v = omega (x - W/2)
FlowField generate_synthetic_field(FieldKind kind, const GridGeometry& geometry,
                                   const SyntheticParams& params);

}  // namespace auvplan
