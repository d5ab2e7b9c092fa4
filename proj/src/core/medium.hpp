#pragma once

#include <array>
#include <optional>

#include "core/grid.hpp"

namespace vispat {

// Raw physical maps as supplied by the user/phantom generator.
// Absorption coefficients are in dB MHz^-y cm^-1 (converted internally).
struct RawMaps {
  Field rho;     // density, kg/m^3
  Field cp;      // compressional speed, m/s
  Field cs;      // shear speed, m/s (0 marks fluid)
  Field a0p_db;  // compressional absorption, dB MHz^-y cm^-1
  Field a0s_db;  // shear absorption, dB MHz^-y cm^-1
  double y = 1.4;
};

// Converts a power-law absorption coefficient from dB MHz^-y cm^-1 to
// Np (rad/s)^-y m^-1: dB -> Np via 20/ln10, cm^-1 -> m^-1 via x100,
// MHz^-y -> (rad/s)^-y via (2 pi 1e6)^-y.
double absorption_db_to_neper(double alpha_db, double y);

// Index of unordered off-diagonal pair (i<j): (0,1)->0, (0,2)->1, (1,2)->2.
inline int pair_index(int i, int j) { return i + j - 1; }

// Derived Kelvin-Voigt coefficient fields, plus half-cell staggered variants
// used on the velocity/shear-stress grids. Immutable once built.
struct Medium {
  double y = 1.4;
  double c0p = 0;  // max cp (k-space reference speed)
  double c0s = 0;  // shear-branch k-space reference; equals c0p (see .cpp)
  bool fluid_only = false;

  Field rho, cp, cs;
  Field lambda, mu, chi, eta;
  // tau[mode][kind]: mode 0=p 1=s, kind 0=dis 1=abs (cell centers)
  std::array<std::array<Field, 2>, 2> tau;

  // Staggered variants. rho_st[a] = T_a rho (velocity positions);
  // mu_st/eta_st[pair_index(i,j)] = T_i T_j (off-diagonal stress positions);
  // tau_st[mode][kind][a] = T_a tau (velocity positions).
  std::array<Field, 3> rho_st;
  std::array<Field, 3> mu_st, eta_st;
  std::array<std::array<std::array<Field, 3>, 2>, 2> tau_st;
};

// Linear (arithmetic-mean, periodic) interpolation to half-cell-shifted
// positions along each axis in `axes`.
Field stagger(const Grid& g, const Field& map, const std::vector<int>& axes);

Medium derive_coefficients(const RawMaps& raw, const Grid& g);

struct FrequencyLimits {
  double p_hz;
  std::optional<double> s_hz;  // absent for fluid-only media
};
FrequencyLimits max_supported_frequency(const Medium& m, const Grid& g);

}  // namespace vispat
