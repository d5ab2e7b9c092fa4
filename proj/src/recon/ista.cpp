#include "recon/ista.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace vispat {

void ReconConfig::validate() const {
  if (lambda_r < 0) throw ConfigError("recon: lambda_r must be >= 0");
  if (step_factor <= 0 || step_factor >= 2)
    throw ConfigError("recon: step_factor must be in (0,2)");
  if (eps <= 0) throw ConfigError("recon: eps must be > 0");
  if (max_iter < 1) throw ConfigError("recon: max_iter must be >= 1");
  if (tv_iters < 1) throw ConfigError("recon: tv_iters must be >= 1");
  if (power_max_iter < 1) throw ConfigError("recon: power_max_iter must be >= 1");
}

PowerIterResult power_iteration(
    const std::function<Field(const Field&)>& normal_op, std::size_t n,
    int max_iter, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field x(n);
  for (auto& v : x) v = gauss(rng);
  PowerIterResult res;
  double prev = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw NumericalError("power iteration: operator annihilated probe");
    for (auto& v : x) v /= nrm;
    Field y = normal_op(x);
    double est = 0.0;  // Rayleigh quotient with unit x
    for (std::size_t i = 0; i < n; ++i) est += x[i] * y[i];
    res.value = est;
    res.iters = k;
    if (k > 1 && std::abs(est - prev) <= tol * std::abs(est)) {
      res.converged = true;
      break;
    }
    prev = est;
    x = std::move(y);
  }
  return res;
}

double relative_error_pct(const Field& p, const Field& ref) {
  if (p.size() != ref.size()) throw ShapeError("relative_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw ConfigError("relative_error: zero-norm reference");
  return 100.0 * std::sqrt(num / den);
}

Reconstructor::Reconstructor(const Grid& g, const Medium& med,
                             const PmlProfile& pml, const SpectralOps& ops,
                             const SensorArray& sensors)
    : g_(g), med_(med), sensors_(sensors), fwd_(g, med, pml, ops),
      adj_(g, med, pml, ops) {}

TimeSeries Reconstructor::apply_forward(const Field& p) {
  return fwd_.run(p, sensors_);
}

Field Reconstructor::apply_adjoint(const TimeSeries& r) {
  return adj_.run(r, sensors_);
}

Field Reconstructor::gradient_f(const Field& p, const TimeSeries& data) {
  if (p.size() != g_.npoints()) throw ShapeError("gradient_f: field size mismatch");
  TimeSeries r = apply_forward(p);
  if (r.ns != data.ns || r.nt != data.nt)
    throw ShapeError("gradient_f: data shape mismatch");
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= data.data[i];
  return apply_adjoint(r);
}

double Reconstructor::objective_f(const Field& p, const TimeSeries& data) {
  TimeSeries r = apply_forward(p);
  if (r.ns != data.ns || r.nt != data.nt)
    throw ShapeError("objective_f: data shape mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    const double d = r.data[i] - data.data[i];
    f += d * d;
  }
  return 0.5 * f;
}

std::string Reconstructor::cache_key() const {
  // FNV-1a over everything the normal operator depends on
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_field = [&](const Field& f) { mix(f.data(), f.size() * sizeof(double)); };
  mix(&g_.d, sizeof(g_.d));
  mix(g_.n.data(), sizeof(g_.n));
  mix(g_.dx.data(), sizeof(g_.dx));
  mix(&g_.dt, sizeof(g_.dt));
  mix(&g_.nt, sizeof(g_.nt));
  mix(&g_.c0p, sizeof(g_.c0p));
  mix(&g_.c0s, sizeof(g_.c0s));
  mix_field(med_.rho);
  mix_field(med_.cp);
  mix_field(med_.cs);
  mix_field(med_.chi);
  mix_field(med_.eta);
  mix(&med_.y, sizeof(med_.y));
  for (const auto& c : sensors_.coords()) mix(c.data(), sizeof(c));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

PowerIterResult Reconstructor::lipschitz(const ReconConfig& cfg) {
  if (cfg.lf > 0) return {cfg.lf, 0, true};
  std::string cache_path;
  if (const char* dir = std::getenv("VISPAT_CACHE_DIR")) {
    cache_path = std::string(dir) + "/lf_" + cache_key() + ".txt";
    std::ifstream in(cache_path);
    double v;
    if (in >> v && v > 0) return {v, 0, true};
  }
  auto normal = [this](const Field& x) {
    return apply_adjoint(apply_forward(x));
  };
  PowerIterResult res = power_iteration(normal, g_.npoints(),
                                        cfg.power_max_iter, cfg.power_tol,
                                        cfg.seed);
  if (res.converged && !cache_path.empty()) {
    std::ofstream out(cache_path);
    out.precision(17);
    out << res.value << "\n";
  }
  return res;
}

IstaResult Reconstructor::run(const TimeSeries& data, const ReconConfig& cfg,
                              const Field* phantom) {
  cfg.validate();
  if (data.nt != g_.nt || data.ns != sensors_.count())
    throw ShapeError("run_ista: data shape mismatch");
  const std::size_t n = g_.npoints();
  if (phantom && phantom->size() != n)
    throw ShapeError("run_ista: phantom size mismatch");

  IstaResult res;
  PowerIterResult li = lipschitz(cfg);
  res.lf = li.value;
  if (res.lf <= 0) throw NumericalError("run_ista: nonpositive Lipschitz estimate");
  const double gamma = cfg.step_factor / res.lf;

  res.p.assign(n, 0.0);
  // residual H p - data, kept current so each iteration costs one forward
  // and one adjoint run
  TimeSeries resid = data;
  for (double& v : resid.data) v = -v;
  double prev_obj = 0.0;
  int rising = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 1; k <= cfg.max_iter; ++k) {
    Field grad = apply_adjoint(resid);
    Field y = res.p;
    for (std::size_t i = 0; i < n; ++i) y[i] -= gamma * grad[i];
    res.p = tv_prox(g_, y, cfg.lambda_r * gamma, cfg.tv_iters, cfg.tv_tol);

    resid = apply_forward(res.p);
    double f = 0.0;
    for (std::size_t i = 0; i < resid.data.size(); ++i) {
      resid.data[i] -= data.data[i];
      f += resid.data[i] * resid.data[i];
    }
    const double obj = 0.5 * f + cfg.lambda_r * tv_value(g_, res.p);
    IterateRecord rec;
    rec.k = k;
    rec.objective = obj;
    rec.re = phantom ? relative_error_pct(res.p, *phantom)
                     : std::numeric_limits<double>::quiet_NaN();
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    res.history.push_back(rec);

    if (k > 1) {
      if (obj > prev_obj) {
        if (++rising >= 5)
          throw NumericalError(
              "run_ista: objective increased for 5 consecutive iterations; "
              "reduce step_factor below " + std::to_string(cfg.step_factor));
      } else {
        rising = 0;
      }
      if (1.0 - obj / prev_obj < cfg.eps) {
        res.stop_reason = "tolerance";
        return res;
      }
    }
    prev_obj = obj;
  }
  res.stop_reason = "max_iter";
  return res;
}

}  // namespace vispat
