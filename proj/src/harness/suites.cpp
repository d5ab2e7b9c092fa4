#include "harness/suites.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "harness/phantom.hpp"
#include "solver/adjoint.hpp"
#include "solver/discrete_adjoint.hpp"
#include "solver/forward.hpp"

namespace vispat {

namespace {

double rel_diff(double a, double b) {
  const double den = std::max(std::abs(a), std::abs(b));
  return den == 0.0 ? 0.0 : std::abs(a - b) / den;
}

TimeSeries random_data(const Grid& g, int ns, std::uint64_t seed) {
  TimeSeries ts;
  ts.ns = ns;
  ts.nt = g.nt;
  ts.dt = g.dt;
  ts.data.resize(static_cast<std::size_t>(ns) * g.nt);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : ts.data) v = gauss(rng);
  return ts;
}

double run_trial(const Grid& g, const Medium& med, const PmlProfile& pml,
                 const SpectralOps& ops, const SensorArray& sensors,
                 AdjointPath path, double disk_radius_frac,
                 std::uint64_t seed) {
  Field p0 = random_disk_p0(g, disk_radius_frac, seed);
  TimeSeries ph = random_data(g, sensors.count(), seed ^ 0x9e3779b97f4a7c15ull);
  ForwardSolver fwd(g, med, pml, ops);
  TimeSeries sim = fwd.run(p0, sensors);
  double lhs = 0.0;
  for (std::size_t i = 0; i < sim.data.size(); ++i)
    lhs += sim.data[i] * ph.data[i];
  Field back;
  if (path == AdjointPath::Discrete) {
    DiscreteAdjoint da(g, med, pml, ops);
    back = da.run(ph, sensors);
  } else {
    AdjointSolver as(g, med, pml, ops);
    back = as.run(ph, sensors);
  }
  double rhs = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) rhs += p0[i] * back[i];
  return rel_diff(lhs, rhs);
}

}  // namespace

SuiteStats inner_product_suite(const Grid& g, const Medium& med,
                               const PmlProfile& pml, const SpectralOps& ops,
                               const SensorArray& sensors, int trials,
                               std::uint64_t seed, AdjointPath path,
                               double disk_radius_frac, int jobs) {
  if (trials < 1) throw ConfigError("inner_product_suite: trials must be >= 1");
  SuiteStats st;
  st.trials.resize(trials);
  jobs = std::max(1, std::min(jobs, trials));
  auto work = [&](int lo, int hi) {
    for (int t = lo; t < hi; ++t)
      st.trials[t] = run_trial(g, med, pml, ops, sensors, path,
                               disk_radius_frac, seed + t);
  };
  if (jobs == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    const int chunk = (trials + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      const int lo = j * chunk, hi = std::min(trials, lo + chunk);
      if (lo < hi)
        pool.emplace_back([&, lo, hi, j] {
          try {
            work(lo, hi);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  st.min = st.max = st.trials[0];
  for (double v : st.trials) {
    st.mean += v;
    st.min = std::min(st.min, v);
    st.max = std::max(st.max, v);
  }
  st.mean /= trials;
  return st;
}

std::vector<ReportRow> adjoint_equivalence_report(
    const std::vector<int>& grid_sizes, bool lossy, std::uint64_t seed,
    int jobs) {
  std::vector<ReportRow> rows;
  for (int nx : grid_sizes) {
    // default 2D skull configuration at scale nx (14 cm domain ratios)
    const double dxm = 0.14 / nx;
    Grid g = make_grid(2, {nx, nx, 1}, {dxm, dxm, dxm}, nx, 0.3, 3000.0);
    PhantomSpec spec;
    spec.n_detectors = std::max(8, nx / 4);
    Phantom ph = make_phantom(spec, g);
    if (!lossy) {
      std::fill(ph.maps.a0p_db.begin(), ph.maps.a0p_db.end(), 0.0);
      std::fill(ph.maps.a0s_db.begin(), ph.maps.a0s_db.end(), 0.0);
    }
    Medium med = derive_coefficients(ph.maps, g);
    g.c0p = med.c0p;
    g.c0s = med.c0s;
    PmlProfile pml = build_pml(g, std::max(4, nx / 16), 2.0);
    SpectralOps ops(g, med.y);
    SensorArray sensors(g, ph.sensors);

    // <Tx, y> vs <x, T*y> on random stacked fields
    {
      DiscreteAdjoint da(g, med, pml, ops);
      std::mt19937_64 rng(seed ^ (0x1234u + nx));
      std::normal_distribution<double> gauss(0.0, 1.0);
      WaveState x, y, tx, ty;
      x.init(da.layout(), g.npoints());
      y.init(da.layout(), g.npoints());
      for (double& v : x.x) v = gauss(rng);
      for (double& v : y.x) v = gauss(rng);
      da.apply_T(x, tx);
      da.apply_T_star(y, ty);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < x.x.size(); ++i) {
        a += tx.x[i] * y.x[i];
        b += x.x[i] * ty.x[i];
      }
      rows.push_back({nx, "tstar_dot", rel_diff(a, b)});
    }
    // full-run inner-product tests for both adjoint paths
    SuiteStats dis = inner_product_suite(g, med, pml, ops, sensors, 3,
                                         seed + nx, AdjointPath::Discrete,
                                         0.8 * spec.detection_radius_frac, jobs);
    rows.push_back({nx, "lemma2_dot", dis.mean});
    SuiteStats ana = inner_product_suite(g, med, pml, ops, sensors, 3,
                                         seed + nx, AdjointPath::Analytic,
                                         0.8 * spec.detection_radius_frac, jobs);
    rows.push_back({nx, "analytic_dot", ana.mean});
    // direct comparison of the two adjoint outputs on shared data
    {
      TimeSeries data = random_data(g, sensors.count(), seed + 7 * nx);
      DiscreteAdjoint da(g, med, pml, ops);
      AdjointSolver as(g, med, pml, ops);
      Field f1 = da.run(data, sensors);
      Field f2 = as.run(data, sensors);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < f1.size(); ++i) {
        num += (f1[i] - f2[i]) * (f1[i] - f2[i]);
        den += f1[i] * f1[i];
      }
      rows.push_back({nx, "analytic_vs_discrete",
                      den == 0.0 ? 0.0 : std::sqrt(num / den)});
    }
  }
  return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "grid,test,relative_error\n";
  for (const auto& r : rows)
    os << r.grid << "," << r.test << "," << r.relative_error << "\n";
  return os.str();
}

}  // namespace vispat
