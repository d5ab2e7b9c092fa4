#include <cmath>
#include <random>

#include "doctest.h"

#include "harness/phantom.hpp"
#include "harness/suites.hpp"
#include "solver/adjoint.hpp"
#include "solver/discrete_adjoint.hpp"
#include "solver/forward.hpp"

using namespace vispat;

TEST_CASE("adjoint: prepared data series (Eq. adj_data)") {
  Grid g = make_grid(2, {8, 8, 1}, {1e-3, 1e-3, 1e-3}, 4, 0.3, 1500.0);
  RawMaps raw;
  raw.rho.assign(g.npoints(), 1000.0);
  raw.cp.assign(g.npoints(), 1500.0);
  raw.cs.assign(g.npoints(), 0.0);
  raw.a0p_db.assign(g.npoints(), 0.0);
  raw.a0s_db.assign(g.npoints(), 0.0);
  Medium med = derive_coefficients(raw, g);
  g.c0p = med.c0p;
  g.c0s = med.c0s;
  PmlProfile pml = build_pml(g, 2, 2.0);
  SpectralOps ops(g, med.y);
  AdjointSolver as(g, med, pml, ops);

  TimeSeries data;
  data.ns = 1;
  data.nt = 4;
  data.dt = g.dt;
  data.data = {10.0, 20.0, 30.0, 40.0};  // P_hat_0 .. P_hat_3
  TimeSeries adj = as.prepare_adjoint_data(data);
  const double sc = 1.0 / (2.0 * g.dt);
  REQUIRE(adj.nt == 5);
  CHECK(adj.at(0, 0) == doctest::Approx(sc * 40.0));          // P3
  CHECK(adj.at(0, 1) == doctest::Approx(sc * (40.0 + 30.0))); // P3+P2
  CHECK(adj.at(0, 2) == doctest::Approx(sc * (30.0 + 20.0)));
  CHECK(adj.at(0, 3) == doctest::Approx(sc * (20.0 + 10.0)));
  CHECK(adj.at(0, 4) == doctest::Approx(sc * 10.0));          // P0

  TimeSeries tiny;
  tiny.ns = 1;
  tiny.nt = 1;
  tiny.dt = g.dt;
  tiny.data = {1.0};
  CHECK_THROWS_AS(as.prepare_adjoint_data(tiny), ConfigError);
}

TEST_CASE("adjoint: exactness on a lossy 16^2 skull (all four checks)") {
  auto rows = adjoint_equivalence_report({16}, true, 42, 1);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    INFO(r.test);
    CHECK(r.relative_error < 1e-12);
  }
}

TEST_CASE("adjoint: lossless path is equally exact") {
  auto rows = adjoint_equivalence_report({16}, false, 43, 1);
  for (const auto& r : rows) {
    INFO(r.test);
    CHECK(r.relative_error < 1e-12);
  }
}

TEST_CASE("adjoint: inner-product suite statistics") {
  const int nx = 16;
  const double dx = 0.14 / nx;
  Grid g = make_grid(2, {nx, nx, 1}, {dx, dx, dx}, nx, 0.3, 3000.0);
  PhantomSpec spec;
  spec.n_detectors = 8;
  Phantom ph = make_phantom(spec, g);
  Medium med = derive_coefficients(ph.maps, g);
  g.c0p = med.c0p;
  g.c0s = med.c0s;
  PmlProfile pml = build_pml(g, 4, 2.0);
  SpectralOps ops(g, med.y);
  SensorArray sensors(g, ph.sensors);

  SuiteStats one = inner_product_suite(g, med, pml, ops, sensors, 1, 7,
                                       AdjointPath::Discrete, 0.3, 1);
  CHECK(one.trials.size() == 1);
  CHECK(one.mean == one.min);
  CHECK(one.mean == one.max);

  // parallel execution returns the same per-trial numbers
  SuiteStats st1 = inner_product_suite(g, med, pml, ops, sensors, 4, 7,
                                       AdjointPath::Discrete, 0.3, 1);
  SuiteStats st2 = inner_product_suite(g, med, pml, ops, sensors, 4, 7,
                                       AdjointPath::Discrete, 0.3, 4);
  REQUIRE(st1.trials.size() == st2.trials.size());
  for (std::size_t i = 0; i < st1.trials.size(); ++i)
    CHECK(st1.trials[i] == st2.trials[i]);
  CHECK_THROWS_AS(inner_product_suite(g, med, pml, ops, sensors, 0, 7,
                                      AdjointPath::Discrete, 0.3, 1),
                  ConfigError);
}

TEST_CASE("adjoint: 3D discrete adjoint is exact too") {
  const int nx = 8;
  const double dx = 0.04 / nx;
  Grid g = make_grid(3, {nx, nx, nx}, {dx, dx, dx}, nx, 0.3, 3000.0);
  PhantomSpec spec;
  spec.kind = PhantomKind::SkullSlab3D;
  spec.n_detectors = 3;
  Phantom ph = make_phantom(spec, g);
  Medium med = derive_coefficients(ph.maps, g);
  g.c0p = med.c0p;
  g.c0s = med.c0s;
  PmlProfile pml = build_pml(g, 2, 2.0);
  SpectralOps ops(g, med.y);
  SensorArray sensors(g, ph.sensors);
  SuiteStats st = inner_product_suite(g, med, pml, ops, sensors, 2, 17,
                                      AdjointPath::Discrete, 0.3, 1);
  CHECK(st.max < 1e-12);
  SuiteStats sa = inner_product_suite(g, med, pml, ops, sensors, 2, 17,
                                      AdjointPath::Analytic, 0.3, 1);
  CHECK(sa.max < 1e-12);
}
