#include <cmath>
#include <random>

#include "doctest.h"

#include "harness/phantom.hpp"
#include "recon/ista.hpp"
#include "recon/tv.hpp"

using namespace vispat;

namespace {

// Independent primal solver for prox_{w TV + positivity}(y) on small grids:
// ADMM on  min 0.5||p-y||^2 + w sum_z ||(Dp)_z||_2 + indicator(z >= 0)
// with consensus variables g = Dp and q = p. D is the same forward-difference
// replicate-boundary gradient as recon/tv.cpp. The p-update solves the dense
// normal equations by Gaussian elimination, so this shares no code with the
// dual projection method under test.
Field tv_prox_admm(const Grid& g, const Field& y, double w, int iters) {
  const int n0 = g.n[0], n1 = g.n[1];
  const int N = n0 * n1;
  const int E = 2 * N;  // gradient rows: axis 0 then axis 1, zero at edges
  auto didx = [&](int axis, int i, int j) { return axis * N + i * n1 + j; };

  // dense D
  std::vector<double> D(static_cast<std::size_t>(E) * N, 0.0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      if (i + 1 < n0) {
        D[static_cast<std::size_t>(didx(0, i, j)) * N + (i + 1) * n1 + j] = 1;
        D[static_cast<std::size_t>(didx(0, i, j)) * N + i * n1 + j] = -1;
      }
      if (j + 1 < n1) {
        D[static_cast<std::size_t>(didx(1, i, j)) * N + i * n1 + j + 1] = 1;
        D[static_cast<std::size_t>(didx(1, i, j)) * N + i * n1 + j] = -1;
      }
    }

  const double rho = 1.0;
  // A = (1 + rho) I + rho D^T D, factored once by Gauss elimination
  std::vector<double> A(static_cast<std::size_t>(N) * N, 0.0);
  for (int r = 0; r < N; ++r) A[static_cast<std::size_t>(r) * N + r] = 1 + rho;
  for (int e = 0; e < E; ++e)
    for (int a = 0; a < N; ++a) {
      const double de = D[static_cast<std::size_t>(e) * N + a];
      if (de == 0) continue;
      for (int b = 0; b < N; ++b)
        A[static_cast<std::size_t>(a) * N + b] +=
            rho * de * D[static_cast<std::size_t>(e) * N + b];
    }
  auto solve = [&](std::vector<double> M, std::vector<double> rhs) {
    for (int c = 0; c < N; ++c) {
      int piv = c;
      for (int r = c + 1; r < N; ++r)
        if (std::abs(M[static_cast<std::size_t>(r) * N + c]) >
            std::abs(M[static_cast<std::size_t>(piv) * N + c]))
          piv = r;
      for (int k = 0; k < N; ++k)
        std::swap(M[static_cast<std::size_t>(c) * N + k],
                  M[static_cast<std::size_t>(piv) * N + k]);
      std::swap(rhs[c], rhs[piv]);
      const double pv = M[static_cast<std::size_t>(c) * N + c];
      for (int r = c + 1; r < N; ++r) {
        const double f = M[static_cast<std::size_t>(r) * N + c] / pv;
        if (f == 0) continue;
        for (int k = c; k < N; ++k)
          M[static_cast<std::size_t>(r) * N + k] -=
              f * M[static_cast<std::size_t>(c) * N + k];
        rhs[r] -= f * rhs[c];
      }
    }
    for (int r = N - 1; r >= 0; --r) {
      double s = rhs[r];
      for (int k = r + 1; k < N; ++k)
        s -= M[static_cast<std::size_t>(r) * N + k] * rhs[k];
      rhs[r] = s / M[static_cast<std::size_t>(r) * N + r];
    }
    return rhs;
  };

  std::vector<double> p(N, 0.0), gg(E, 0.0), u(E, 0.0), q(N, 0.0), s(N, 0.0);
  for (int it = 0; it < iters; ++it) {
    // p-update
    std::vector<double> rhs(N);
    for (int a = 0; a < N; ++a) {
      double t = y[a] + rho * (q[a] - s[a]);
      for (int e = 0; e < E; ++e)
        t += rho * D[static_cast<std::size_t>(e) * N + a] * (gg[e] - u[e]);
      rhs[a] = t;
    }
    p = solve(A, rhs);
    // g-update: group shrinkage per pixel over the 2 axis components
    for (int z = 0; z < N; ++z) {
      double v[2], mag = 0.0;
      for (int a = 0; a < 2; ++a) {
        double dp = 0.0;
        for (int b = 0; b < N; ++b)
          dp += D[static_cast<std::size_t>(a * N + z) * N + b] * p[b];
        v[a] = dp + u[a * N + z];
        mag += v[a] * v[a];
      }
      mag = std::sqrt(mag);
      const double sh = mag > 0 ? std::max(0.0, 1.0 - w / (rho * mag)) : 0.0;
      for (int a = 0; a < 2; ++a) gg[a * N + z] = sh * v[a];
    }
    // q-update: positivity
    for (int a = 0; a < N; ++a) q[a] = std::max(p[a] + s[a], 0.0);
    // dual updates
    for (int e = 0; e < E; ++e) {
      double dp = 0.0;
      for (int b = 0; b < N; ++b)
        dp += D[static_cast<std::size_t>(e) * N + b] * p[b];
      u[e] += dp - gg[e];
    }
    for (int a = 0; a < N; ++a) s[a] += p[a] - q[a];
  }
  Field out(N);
  for (int a = 0; a < N; ++a) out[a] = q[a];
  return out;
}

Grid tiny_grid(int n0, int n1) {
  return make_grid(2, {n0, n1, 1}, {1e-3, 1e-3, 1e-3}, 8, 0.3, 1500.0);
}

}  // namespace

TEST_CASE("tv: value on a hand-computed example") {
  Grid g = tiny_grid(4, 4);
  Field p(16, 0.0);
  p[1 * 4 + 1] = 2.0;  // single spike
  // row diffs: +2 at (0,1),  -2 at (1,1); col diffs: +2 at (1,0), -2 at (1,1)
  // pixel (0,1): |(2,0)| = 2 ; (1,0): |(0,2)| = 2 ;
  // (1,1): |(-2,-2)| = 2 sqrt 2
  CHECK(tv_value(g, p) == doctest::Approx(4.0 + 2.0 * std::sqrt(2.0)));
  CHECK(tv_value(g, Field(16, 5.0)) == doctest::Approx(0.0));
}

TEST_CASE("tv: prox matches an independent primal ADMM solve") {
  Grid g = tiny_grid(4, 4);
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    Field y(16);
    for (double& v : y) v = gauss(rng);
    const double w = 0.05 + 0.1 * inst;
    Field a = tv_prox(g, y, w, 20000, 1e-13);
    Field b = tv_prox_admm(g, y, w, 4000);
    for (int z = 0; z < 16; ++z) worst = std::max(worst, std::abs(a[z] - b[z]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("tv: prox degenerate cases") {
  Grid g = tiny_grid(4, 4);
  Field y(16);
  for (int z = 0; z < 16; ++z) y[z] = z - 8.0;
  Field p = tv_prox(g, y, 0.0);
  for (int z = 0; z < 16; ++z) CHECK(p[z] == std::max(y[z], 0.0));
  // any weight: output is nonnegative
  p = tv_prox(g, y, 0.7, 500, 1e-12);
  for (double v : p) CHECK(v >= 0.0);
  CHECK_THROWS_AS(tv_prox(g, y, -1.0), ConfigError);
  CHECK_THROWS_AS(tv_prox(g, Field(3, 0.0), 1.0), ShapeError);
}

TEST_CASE("power iteration: diagonal operator") {
  auto op = [](const Field& x) {
    Field y = x;
    y[0] *= 9.0;
    y[1] *= 4.0;
    y[2] *= 1.0;
    return y;
  };
  PowerIterResult r = power_iteration(op, 3, 200, 1e-10, 5);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(r.iters >= 2);
}

TEST_CASE("relative error") {
  Field a = {1.0, 2.0, 2.0};
  CHECK(relative_error_pct(a, a) == doctest::Approx(0.0));
  CHECK(relative_error_pct(Field(3, 0.0), a) == doctest::Approx(100.0));
  CHECK_THROWS_AS(relative_error_pct(a, Field(3, 0.0)), ConfigError);
  CHECK_THROWS_AS(relative_error_pct(a, Field(2, 1.0)), ShapeError);
}

TEST_CASE("recon config validation") {
  ReconConfig c;
  CHECK_NOTHROW(c.validate());
  c.step_factor = 2.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ReconConfig{};
  c.lambda_r = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ReconConfig{};
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("ista: single iteration bookkeeping on a tiny problem") {
  const int nx = 16;
  const double dx = 0.14 / nx;
  Grid g = make_grid(2, {nx, nx, 1}, {dx, dx, dx}, 24, 0.3, 3000.0);
  PhantomSpec spec;
  spec.n_detectors = 6;
  Phantom ph = make_phantom(spec, g);
  Medium med = derive_coefficients(ph.maps, g);
  g.c0p = med.c0p;
  g.c0s = med.c0s;
  PmlProfile pml = build_pml(g, 3, 2.0);
  SpectralOps ops(g, med.y);
  SensorArray sensors(g, ph.sensors);

  Reconstructor rec(g, med, pml, ops, sensors);
  TimeSeries data = rec.apply_forward(ph.p0);
  ReconConfig rc;
  rc.max_iter = 1;
  rc.tv_iters = 10;
  IstaResult res = rec.run(data, rc, &ph.p0);
  REQUIRE(res.history.size() == 1);
  CHECK(res.stop_reason == "max_iter");
  CHECK(res.lf > 0.0);
  CHECK(res.history[0].objective > 0.0);
  CHECK(std::isfinite(res.history[0].re));

  // shape errors
  TimeSeries bad = data;
  bad.nt -= 1;
  bad.data.resize(static_cast<std::size_t>(bad.ns) * bad.nt);
  CHECK_THROWS_AS(rec.run(bad, rc), ShapeError);
}
