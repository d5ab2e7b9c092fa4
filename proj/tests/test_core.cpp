#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"

#include "core/field_io.hpp"
#include "core/grid.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"

using namespace vispat;

TEST_CASE("grid: centered coordinates and DFT wavenumbers") {
  Grid g = make_grid(2, {8, 6, 1}, {0.5, 0.25, 0.25}, 10, 0.3, 1500.0);
  CHECK(g.dt == doctest::Approx(0.3 * 0.25 / 1500.0));
  // midpoint of the axis is the origin
  CHECK(g.coord(0, 0) == doctest::Approx(-0.5 * 7 * 0.5));
  CHECK(g.coord(0, 7) == doctest::Approx(0.5 * 7 * 0.5));
  CHECK(g.coord(0, 3) + g.coord(0, 4) == doctest::Approx(0.0));
  // wavenumber ordering: 0, +, ..., nyquist, ..., -
  CHECK(g.k_axis(0, 0) == 0.0);
  CHECK(g.k_axis(0, 1) == doctest::Approx(2.0 * 3.14159265358979 / (8 * 0.5)));
  CHECK(g.k_axis(0, 7) == doctest::Approx(-g.k_axis(0, 1)));
  CHECK(g.is_nyquist(0, 4));
  CHECK(!g.is_nyquist(0, 3));
}

TEST_CASE("grid: validation errors") {
  CHECK_THROWS_AS(make_grid(4, {8, 8, 8}, {1, 1, 1}, 10, 0.3, 1500.0),
                  ConfigError);
  CHECK_THROWS_AS(make_grid(2, {2, 8, 1}, {1, 1, 1}, 10, 0.3, 1500.0),
                  ConfigError);
  CHECK_THROWS_AS(make_grid(2, {8, 8, 1}, {1, 1, 1}, 1, 0.3, 1500.0),
                  ConfigError);
  CHECK_THROWS_AS(make_grid(2, {8, 8, 1}, {1, 1, 1}, 10, 0.3, 0.0),
                  ConfigError);
}

TEST_CASE("field_io: bitwise round trip") {
  FieldData f;
  f.rank = 3;
  f.n = {5, 4, 3};
  f.dx = {0.1, 0.2, 0.3};
  f.tag = "unit test field";
  f.data.resize(f.count());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (double& v : f.data) v = gauss(rng);

  const std::string path =
      (std::filesystem::temp_directory_path() / "fio_roundtrip.fld").string();
  write_field(path, f);
  FieldData r = read_field(path);
  CHECK(r.rank == f.rank);
  CHECK(r.n == f.n);
  CHECK(r.tag == f.tag);
  REQUIRE(r.data.size() == f.data.size());
  CHECK(std::memcmp(r.data.data(), f.data.data(),
                    f.data.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(r.dx.data(), f.dx.data(), 3 * sizeof(double)) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("field_io: rejects garbage") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "fio_bad.fld").string();
  {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    std::fputs("not a field file at all", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(read_field(path), IoError);
  CHECK_THROWS_AS(read_field(path + ".missing"), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("sensors: interpolation weights and transpose") {
  Grid g = make_grid(2, {16, 16, 1}, {1e-3, 1e-3, 1e-3}, 10, 0.3, 1500.0);
  std::vector<std::array<double, 3>> coords = {
      {g.coord(0, 4), g.coord(1, 7), 0.0},               // on a node
      {g.coord(0, 4) + 0.3e-3, g.coord(1, 7) + 0.7e-3, 0.0},  // off-node
  };
  SensorArray sa(g, coords);
  REQUIRE(sa.count() == 2);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Field f(g.npoints());
  for (double& v : f) v = gauss(rng);
  std::vector<double> out(2);
  sa.sample(f.data(), out.data());
  CHECK(out[0] == doctest::Approx(f[4 * 16 + 7]).epsilon(1e-14));

  // <W f, s> == <f, W^T s>
  std::vector<double> s = {gauss(rng), gauss(rng)};
  Field ft(g.npoints(), 0.0);
  sa.scatter_add(s.data(), ft.data());
  double lhs = out[0] * s[0] + out[1] * s[1];
  double rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) rhs += f[i] * ft[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("pml: profile shape") {
  Grid g = make_grid(2, {32, 32, 1}, {1e-3, 1e-3, 1e-3}, 10, 0.3, 1500.0);
  g.c0p = 1500.0;
  PmlProfile pml = build_pml(g, 6, 2.0);
  REQUIRE(pml.alpha[0].size() == g.npoints());
  REQUIRE(pml.a_half[0].size() == g.npoints());
  for (int m = 0; m < 2; ++m) {
    // interior untouched, boundary attenuating
    CHECK(pml.alpha[m][16 * 32 + 16] == 0.0);
    for (std::size_t z = 0; z < g.npoints(); ++z) {
      CHECK(pml.alpha[m][z] >= 0.0);
      CHECK(pml.a_half[m][z] <= 1.0);
      CHECK(pml.a_half[m][z] > 0.0);
    }
  }
  CHECK(pml.alpha[0][0] > 0.0);                 // axis-0 boundary corner
  CHECK(pml.alpha[0][16] > 0.0);                // top edge, axis 0 profile
  CHECK(pml.alpha[1][16 * 32 + 0] > 0.0);       // left edge, axis 1 profile
  CHECK(pml.alpha[1][16 * 32 + 16] == 0.0);     // interior
}
