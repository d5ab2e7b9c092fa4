#include "core/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vispat {

double absorption_db_to_neper(double alpha_db, double y) {
  const double db_per_neper = 20.0 / std::numbers::ln10;  // 8.6858896...
  const double w_ref = 2.0 * std::numbers::pi * 1e6;      // 1 MHz in rad/s
  return 100.0 * alpha_db / (db_per_neper * std::pow(w_ref, y));
}

Field stagger(const Grid& g, const Field& map, const std::vector<int>& axes) {
  if (map.size() != g.npoints()) throw ShapeError("stagger: field size mismatch");
  Field out = map;
  const int n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
  const auto at = [&](int z0, int z1, int z2) -> std::size_t {
    return (static_cast<std::size_t>(z0) * n1 + z1) * n2 + z2;
  };
  for (int a : axes) {
    if (a < 0 || a >= g.d) throw ConfigError("stagger: bad axis");
    Field next(out.size());
    for (int z0 = 0; z0 < n0; ++z0) {
      for (int z1 = 0; z1 < n1; ++z1) {
        for (int z2 = 0; z2 < n2; ++z2) {
          int w0 = z0, w1 = z1, w2 = z2;
          if (a == 0) w0 = (z0 + 1) % n0;
          if (a == 1) w1 = (z1 + 1) % n1;
          if (a == 2) w2 = (z2 + 1) % n2;
          next[at(z0, z1, z2)] =
              0.5 * (out[at(z0, z1, z2)] + out[at(w0, w1, w2)]);
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

Medium derive_coefficients(const RawMaps& raw, const Grid& g) {
  const std::size_t n = g.npoints();
  if (raw.rho.size() != n || raw.cp.size() != n || raw.cs.size() != n ||
      raw.a0p_db.size() != n || raw.a0s_db.size() != n)
    throw ShapeError("derive_coefficients: map size mismatch");
  const double y = raw.y;
  if (!(y > 0.0 && y < 2.0) || y == 1.0)
    throw ConfigError("derive_coefficients: y must be in (0,2) with y != 1");
  const double cosy = std::cos(std::numbers::pi * y / 2.0);
  const double siny = std::sin(std::numbers::pi * y / 2.0);

  Medium m;
  m.y = y;
  m.rho = raw.rho;
  m.cp = raw.cp;
  m.cs = raw.cs;
  m.lambda.resize(n);
  m.mu.resize(n);
  m.chi.resize(n);
  m.eta.resize(n);
  for (auto& mode : m.tau)
    for (auto& f : mode) f.resize(n);

  // The loss parametrization (tau ~ cs^(y-1), cs^(y-2)) is singular as
  // cs -> 0: pixels with tiny positive shear speed (e.g. noise-contaminated
  // fluid regions) make the lossy shear branch anti-dissipative and the
  // time stepping blows up. Treat anything below 1% of the map's maximum
  // shear speed as fluid.
  double cs_max = 0.0;
  for (double v : raw.cs) cs_max = std::max(cs_max, v);
  const double cs_floor = 0.01 * cs_max;

  m.c0p = 0.0;
  m.c0s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = raw.rho[i], cp = raw.cp[i];
    double cs = raw.cs[i];
    if (!(rho > 0.0)) throw ConfigError("derive_coefficients: rho must be > 0");
    if (!(cp > 0.0)) throw ConfigError("derive_coefficients: cp must be > 0");
    if (cs < 0.0) throw ConfigError("derive_coefficients: cs must be >= 0");
    if (cs < cs_floor) cs = 0.0;
    const double mu = rho * cs * cs;
    const double lambda = rho * cp * cp - 2.0 * mu;
    if (!(lambda + 2.0 * mu / g.d > 0.0))
      throw ConfigError("derive_coefficients: non-positive bulk stiffness");
    const double a0p = absorption_db_to_neper(raw.a0p_db[i], y);
    const double a0s = absorption_db_to_neper(raw.a0s_db[i], y);
    const double eta = -2.0 * rho * cs * cs * cs * a0s / cosy;
    const double chi = -2.0 * rho * cp * cp * cp * a0p / cosy - 2.0 * eta;
    m.cs[i] = cs;
    m.mu[i] = mu;
    m.lambda[i] = lambda;
    m.eta[i] = eta;
    m.chi[i] = chi;
    m.tau[0][0][i] = std::pow(cp, y - 1.0) * siny;
    m.tau[0][1][i] = std::pow(cp, y - 2.0) * cosy;
    // Fluid regions: the s-mode tau fields are defined as 0 (cs^(y-2) would
    // otherwise blow up as cs -> 0).
    m.tau[1][0][i] = cs > 0.0 ? std::pow(cs, y - 1.0) * siny : 0.0;
    m.tau[1][1][i] = cs > 0.0 ? std::pow(cs, y - 2.0) * cosy : 0.0;
    m.c0p = std::max(m.c0p, cp);
    m.c0s = std::max(m.c0s, cs);
  }
  m.fluid_only = m.c0s == 0.0;
  // Single k-space reference speed for both branches. Giving the shear
  // branch its own (smaller) reference makes the P- and S-corrected
  // derivative operators differ, and in heterogeneous media the branch
  // coupling then slowly pumps energy: a skull phantom grows ~e^(t/80dt)
  // at CFL 0.3. With one reference the scheme is the standard k-space
  // correction and stays bounded; the shear temporal-dispersion error it
  // leaves is O((w dt)^2) and vanishes under refinement.
  m.c0s = m.c0p;

  for (int a = 0; a < g.d; ++a) {
    m.rho_st[a] = stagger(g, m.rho, {a});
    for (int mode = 0; mode < 2; ++mode)
      for (int kind = 0; kind < 2; ++kind)
        m.tau_st[mode][kind][a] = stagger(g, m.tau[mode][kind], {a});
  }
  for (int i = 0; i < g.d; ++i) {
    for (int j = i + 1; j < g.d; ++j) {
      m.mu_st[pair_index(i, j)] = stagger(g, m.mu, {i, j});
      m.eta_st[pair_index(i, j)] = stagger(g, m.eta, {i, j});
    }
  }
  return m;
}

FrequencyLimits max_supported_frequency(const Medium& m, const Grid& g) {
  double maxdx = g.dx[0];
  for (int a = 1; a < g.d; ++a) maxdx = std::max(maxdx, g.dx[a]);
  double min_cp = m.cp[0];
  double min_cs = 0.0;
  bool any_s = false;
  for (std::size_t i = 0; i < m.cp.size(); ++i) {
    min_cp = std::min(min_cp, m.cp[i]);
    if (m.cs[i] > 0.0) {
      min_cs = any_s ? std::min(min_cs, m.cs[i]) : m.cs[i];
      any_s = true;
    }
  }
  FrequencyLimits lim;
  lim.p_hz = min_cp / (2.0 * maxdx);
  if (any_s) lim.s_hz = min_cs / (2.0 * maxdx);
  return lim;
}

}  // namespace vispat
