#include "core/pml.hpp"

#include <algorithm>
#include <cmath>

namespace vispat {

PmlProfile build_pml(const Grid& g, int thickness, double alpha_max,
                     int taper_power) {
  return build_pml(g, std::array<int, 3>{thickness, thickness, thickness},
                   alpha_max, taper_power);
}

PmlProfile build_pml(const Grid& g, const std::array<int, 3>& thickness,
                     double alpha_max, int taper_power) {
  PmlProfile p;
  p.thickness = 0;
  p.alpha_max = alpha_max;
  p.taper_power = taper_power;
  bool any = false;
  for (int a = 0; a < g.d; ++a) {
    if (thickness[a] < 0) throw ConfigError("pml: thickness must be >= 0");
    if (2 * thickness[a] >= g.n[a])
      throw ConfigError("pml: thickness must be < N_i/2");
    p.thickness = std::max(p.thickness, thickness[a]);
    if (thickness[a] > 0) any = true;
  }
  if (any && alpha_max > 0.0 && !(g.c0p > 0))
    throw ConfigError("pml: grid reference speed c0p not set");

  const std::size_t n = g.npoints();
  const auto axis_bin = [&](int a, std::size_t idx) -> int {
    if (a == 0) return static_cast<int>(idx / (static_cast<std::size_t>(g.n[1]) * g.n[2]));
    if (a == 1) return static_cast<int>((idx / g.n[2]) % g.n[1]);
    return static_cast<int>(idx % g.n[2]);
  };
  for (int a = 0; a < g.d; ++a) {
    p.alpha[a].assign(n, 0.0);
    p.a_half[a].assign(n, 1.0);
    const int ta = thickness[a];
    if (ta == 0 || alpha_max == 0.0) continue;
    const double rate_scale = g.c0p / g.dx[a];  // Np/gridpoint -> Np/s
    for (std::size_t i = 0; i < n; ++i) {
      const int z = axis_bin(a, i);
      int xi = 0;
      if (z < ta) xi = ta - z;
      else if (z > g.n[a] - 1 - ta) xi = z - (g.n[a] - 1 - ta);
      if (xi == 0) continue;
      const double frac = static_cast<double>(xi) / ta;
      const double alpha_np = alpha_max * std::pow(frac, taper_power);
      p.alpha[a][i] = alpha_np * rate_scale;
      p.a_half[a][i] = std::exp(-0.5 * p.alpha[a][i] * g.dt);
    }
  }
  return p;
}

}  // namespace vispat
