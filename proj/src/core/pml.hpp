#pragma once

#include <array>

#include "core/grid.hpp"

namespace vispat {

// Split-field PML profiles. alpha[m] attenuates the m-split fields and
// varies only along axis m; A[m] = exp(-alpha_m * dt / 2) is the half-step
// diagonal update factor shared by every field component.
struct PmlProfile {
  int thickness = 0;       // grid points per side
  double alpha_max = 0.0;  // Np per grid point at the outer boundary
  int taper_power = 4;
  std::array<Field, 3> alpha;  // attenuation rate, Np/s
  std::array<Field, 3> a_half;  // exp(-alpha * dt/2)
};

// Quartic (configurable power) taper from 0 at the interior edge to
// alpha_max Np/gridpoint at the boundary. The Np-per-gridpoint value is
// converted to a rate via alpha_rate = alpha_np * c0p / dx (grid points
// traversed per unit time at the reference speed).
PmlProfile build_pml(const Grid& g, int thickness, double alpha_max,
                     int taper_power = 4);

// Per-axis thickness; a zero entry leaves that axis periodic (no layer),
// e.g. plane-wave setups absorbing along the propagation axis only.
PmlProfile build_pml(const Grid& g, const std::array<int, 3>& thickness,
                     double alpha_max, int taper_power = 4);

}  // namespace vispat
