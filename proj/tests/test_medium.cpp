#include <cmath>
#include <numbers>

#include "doctest.h"

#include "core/medium.hpp"

using namespace vispat;

TEST_CASE("medium: absorption unit conversion") {
  // independent evaluation: dB->Np via ln(10)/20, cm^-1 -> m^-1 via 100,
  // MHz^-y -> (rad/s)^-y via (2 pi 1e6)^-y
  const double y = 1.4;
  const double a_db = 0.75;
  const double expected =
      a_db * (std::log(10.0) / 20.0) * 100.0 /
      std::pow(2.0 * std::numbers::pi * 1e6, y);
  CHECK(absorption_db_to_neper(a_db, y) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(absorption_db_to_neper(0.0, y) == 0.0);
}

TEST_CASE("medium: homogeneous fluid coefficients") {
  Grid g = make_grid(2, {8, 8, 1}, {1e-3, 1e-3, 1e-3}, 8, 0.3, 1500.0);
  RawMaps raw;
  const std::size_t n = g.npoints();
  raw.rho.assign(n, 1000.0);
  raw.cp.assign(n, 1500.0);
  raw.cs.assign(n, 0.0);
  raw.a0p_db.assign(n, 0.0);
  raw.a0s_db.assign(n, 0.0);
  raw.y = 1.4;
  Medium m = derive_coefficients(raw, g);
  CHECK(m.fluid_only);
  CHECK(m.c0p == doctest::Approx(1500.0));
  for (std::size_t z = 0; z < n; ++z) {
    CHECK(m.mu[z] == 0.0);
    CHECK(m.lambda[z] == doctest::Approx(1000.0 * 1500.0 * 1500.0));
    CHECK(m.chi[z] == 0.0);
    CHECK(m.eta[z] == 0.0);
  }
}

TEST_CASE("medium: validation") {
  Grid g = make_grid(2, {8, 8, 1}, {1e-3, 1e-3, 1e-3}, 8, 0.3, 1500.0);
  RawMaps raw;
  raw.rho.assign(g.npoints(), 1000.0);
  raw.cp.assign(g.npoints(), 1500.0);
  raw.cs.assign(g.npoints(), 0.0);
  raw.a0p_db.assign(g.npoints(), 0.0);
  raw.a0s_db.assign(g.npoints(), 0.0);
  raw.y = 1.4;

  RawMaps bad = raw;
  bad.rho[3] = -1.0;
  CHECK_THROWS_AS(derive_coefficients(bad, g), ConfigError);
  bad = raw;
  bad.cp.pop_back();
  CHECK_THROWS_AS(derive_coefficients(bad, g), ShapeError);
}

TEST_CASE("medium: staggering preserves constants and the periodic mean") {
  Grid g = make_grid(2, {8, 6, 1}, {1e-3, 1e-3, 1e-3}, 8, 0.3, 1500.0);
  Field c(g.npoints(), 2.5);
  Field sc = stagger(g, c, {0});
  for (double v : sc) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));

  Field f(g.npoints());
  for (std::size_t z = 0; z < f.size(); ++z) f[z] = double(z % 7);
  double m0 = 0.0, m1 = 0.0;
  Field sf = stagger(g, f, {1});
  for (std::size_t z = 0; z < f.size(); ++z) {
    m0 += f[z];
    m1 += sf[z];
  }
  CHECK(m0 == doctest::Approx(m1).epsilon(1e-12));
}

TEST_CASE("medium: supported frequency scales with speed and spacing") {
  Grid g = make_grid(2, {16, 16, 1}, {1e-3, 1e-3, 1e-3}, 8, 0.3, 1500.0);
  RawMaps raw;
  raw.rho.assign(g.npoints(), 1000.0);
  raw.cp.assign(g.npoints(), 1500.0);
  raw.cs.assign(g.npoints(), 0.0);
  raw.a0p_db.assign(g.npoints(), 0.0);
  raw.a0s_db.assign(g.npoints(), 0.0);
  Medium m = derive_coefficients(raw, g);
  FrequencyLimits fl = max_supported_frequency(m, g);
  CHECK(fl.p_hz > 0.0);
  CHECK(fl.p_hz <= 1500.0 / (2.0 * 1e-3));  // at most the two-point limit
  CHECK(!fl.s_hz.has_value());
}
