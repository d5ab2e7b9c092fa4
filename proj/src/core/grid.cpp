#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vispat {

double Grid::k_axis(int a, int z) const {
  const int na = n[a];
  int f = z <= na / 2 ? z : z - na;
  return 2.0 * std::numbers::pi * f / (na * dx[a]);
}

void Grid::validate() const {
  if (d != 2 && d != 3) throw ConfigError("grid: dims must be 2 or 3");
  for (int a = 0; a < d; ++a) {
    if (n[a] < 4) throw ConfigError("grid: need at least 4 points per axis");
    if (!(dx[a] > 0)) throw ConfigError("grid: dx must be positive");
  }
  if (d == 2 && n[2] != 1) throw ConfigError("grid: n[2] must be 1 in 2D");
  if (!(dt > 0)) throw ConfigError("grid: dt must be positive");
  if (nt < 2) throw ConfigError("grid: nt must be at least 2");
}

Grid make_grid(int d, std::array<int, 3> n, std::array<double, 3> dx, int nt,
               double cfl, double max_cp) {
  Grid g;
  g.d = d;
  g.n = n;
  g.dx = dx;
  if (d == 2) {
    g.n[2] = 1;
    g.dx[2] = g.dx[1];
  }
  g.nt = nt;
  g.cfl = cfl;
  if (!(max_cp > 0)) throw ConfigError("grid: max sound speed must be positive");
  double mindx = g.dx[0];
  for (int a = 1; a < d; ++a) mindx = std::min(mindx, g.dx[a]);
  g.dt = cfl * mindx / max_cp;
  g.validate();
  return g;
}

}  // namespace vispat
