#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "core/medium.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"
#include "core/spectral.hpp"
#include "recon/tv.hpp"
#include "solver/discrete_adjoint.hpp"
#include "solver/forward.hpp"

namespace vispat {

struct ReconConfig {
  double lambda_r = 1e-2;    // TV regularization weight
  double step_factor = 1.8;  // Gamma = step_factor / L_f, must be in (0,2)
  double eps = 1e-4;         // stopping tolerance on 1 - F^k/F^{k-1}
  int max_iter = 100;
  int tv_iters = 60;         // dual projection iterations per prox
  double tv_tol = 1e-8;
  int power_max_iter = 30;
  double power_tol = 1e-3;
  std::uint64_t seed = 1;
  double lf = 0;  // Lipschitz constant; 0 means compute (or load from cache)

  void validate() const;
};

struct IterateRecord {
  int k;
  double objective;  // F = f + lambda_r TV
  double re;         // percent; NaN when no phantom supplied
  double seconds;
};

struct IstaResult {
  Field p;
  std::vector<IterateRecord> history;
  std::string stop_reason;
  double lf = 0;
};

struct PowerIterResult {
  double value = 0;  // spectral norm of the normal operator H*H
  int iters = 0;
  bool converged = false;
};

// Power method for the largest eigenvalue of a symmetric PSD operator,
// started from a seeded random vector. Converged when successive estimates
// differ by less than tol relatively.
PowerIterResult power_iteration(
    const std::function<Field(const Field&)>& normal_op, std::size_t n,
    int max_iter, double tol, std::uint64_t seed);

// RE = 100 ||p - ref|| / ||ref||.
double relative_error_pct(const Field& p, const Field& ref);

// Forward/adjoint pair packaged for inversion: H = (sensor-sampled forward
// map including source smoothing), H* = discrete adjoint. Owns its solver
// scratch; one instance per concurrent reconstruction.
class Reconstructor {
 public:
  Reconstructor(const Grid& g, const Medium& med, const PmlProfile& pml,
                const SpectralOps& ops, const SensorArray& sensors);

  TimeSeries apply_forward(const Field& p);
  Field apply_adjoint(const TimeSeries& r);

  // grad f(P) = H*(H P - data)
  Field gradient_f(const Field& p, const TimeSeries& data);
  double objective_f(const Field& p, const TimeSeries& data);

  // Spectral norm of H*H via power iteration, cached on disk when the
  // VISPAT_CACHE_DIR environment variable points at a writable directory
  // (keyed by a hash of grid, medium, PML and sensor layout).
  PowerIterResult lipschitz(const ReconConfig& cfg);

  // Positivity-constrained TV-regularized ISTA from P0 = 0.
  IstaResult run(const TimeSeries& data, const ReconConfig& cfg,
                 const Field* phantom = nullptr);

  const Grid& grid() const { return g_; }

 private:
  std::string cache_key() const;

  const Grid& g_;
  const Medium& med_;
  const SensorArray& sensors_;
  ForwardSolver fwd_;
  DiscreteAdjoint adj_;
};

}  // namespace vispat
