#pragma once

#include <array>
#include <cstddef>

#include "core/common.hpp"

namespace vispat {

// Uniform rectilinear grid with staggered space/time layout.
//
// Grid points are indexed zeta = (z0, ..., z_{d-1}), z_i in [0, n[i]), stored
// row-major (last axis fastest). Physical coordinates are centered:
// x_i(z) = (z - (n[i]-1)/2) * dx[i], so the domain midpoint is the origin.
// Wavenumbers follow the standard DFT ordering: k_i(z) = 2*pi*f/(n*dx) with
// f = z for z <= n/2 and f = z - n for z > n/2 (the Nyquist bin, present for
// even n, carries k = +pi/dx).
struct Grid {
  int d = 2;                      // spatial dimensions, 2 or 3
  std::array<int, 3> n{1, 1, 1};  // points per axis (n[2] == 1 when d == 2)
  std::array<double, 3> dx{0, 0, 0};  // spacing (m)
  double dt = 0;                      // time step (s)
  int nt = 0;                         // number of recorded samples
  double cfl = 0.3;
  double c0p = 0;  // reference compressional speed for k-space correction
  double c0s = 0;  // reference shear speed

  std::size_t npoints() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
  }

  // Wavenumber (rad/m) of DFT bin z along axis a.
  double k_axis(int a, int z) const;

  // Centered physical coordinate of grid index z along axis a.
  double coord(int a, int z) const {
    return (z - 0.5 * (n[a] - 1)) * dx[a];
  }

  // True if bin z along axis a is the (even-n) Nyquist bin.
  bool is_nyquist(int a, int z) const { return n[a] % 2 == 0 && z == n[a] / 2; }

  void validate() const;
};

// Builds a grid, deriving dt from the CFL condition dt = cfl*min(dx)/max_cp.
Grid make_grid(int d, std::array<int, 3> n, std::array<double, 3> dx, int nt,
               double cfl, double max_cp);

}  // namespace vispat
