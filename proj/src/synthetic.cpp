#include "auvplan/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "auvplan/error.hpp"

namespace auvplan {

FieldKind parse_field_kind(std::string_view name) {
  if (name == "uniform") return FieldKind::Uniform;
  if (name == "double_gyre") return FieldKind::DoubleGyre;
  if (name == "rotational") return FieldKind::Rotational;
  throw ValidationError("unknown field kind '" + std::string(name) + "'");
}

std::string_view field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::Uniform: return "uniform";
    case FieldKind::DoubleGyre: return "double_gyre";
    case FieldKind::Rotational: return "rotational";
  }
  return "unknown";
}

FlowField generate_synthetic_field(FieldKind kind, const GridGeometry& geometry,
                                   const SyntheticParams& params) {
  geometry.validate();
  for (double p : {params.u0, params.v0, params.amplitude, params.angular_rate})
    if (!std::isfinite(p)) throw ValidationError("synthetic field parameters must be finite");

  const std::size_t n = geometry.cell_count();
  std::vector<double> u(n), v(n);
  const double pi = std::numbers::pi;
  const double s = geometry.cell_size;
  const double half_x = geometry.nx / 2.0;
  const double half_y = geometry.ny / 2.0;

  std::size_t i = 0;
  for (int l = 0; l < geometry.num_layers(); ++l) {
    for (int iy = 0; iy < geometry.ny; ++iy) {
      for (int ix = 0; ix < geometry.nx; ++ix, ++i) {
        // Fractions of the domain; exact for the cell centers.
        const double fx = (ix + 0.5) / geometry.nx;
        const double fy = (iy + 0.5) / geometry.ny;
        switch (kind) {
          case FieldKind::Uniform:
            u[i] = params.u0;
            v[i] = params.v0;
            break;
          case FieldKind::DoubleGyre:
            // cos(pi f) written as sin(pi (1/2 - f)) so it vanishes exactly at f = 1/2.
            u[i] = -params.amplitude * std::sin(pi * fx) * std::sin(pi * (0.5 - fy));
            v[i] = params.amplitude * std::sin(pi * (0.5 - fx)) * std::sin(pi * fy);
            break;
          case FieldKind::Rotational:
            u[i] = -params.angular_rate * ((iy + 0.5) - half_y) * s;
            v[i] = params.angular_rate * ((ix + 0.5) - half_x) * s;
            break;
        }
      }
    }
  }
  return FlowField(geometry, std::move(u), std::move(v), std::vector<std::uint8_t>(n, 0));
}

}  // namespace auvplan
