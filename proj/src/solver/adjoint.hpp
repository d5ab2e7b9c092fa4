#pragma once

#include "core/medium.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"
#include "core/spectral.hpp"
#include "solver/state.hpp"

namespace vispat {

// Analytic (adjoint-then-discretize) solver: discretizes the continuous
// adjoint system with the same staggered k-space scheme as the forward
// model, driven by the order-reversed, two-step-combined sensor data.
//
// Two deliberate deviations from the naive discretization make this path
// agree with the discrete transpose to machine precision instead of only up
// to PML-boundary terms (both are identities outside the absorbing layer
// where A_m = 1):
//  * the additive adjoint source enters through one extra half-step PML
//    factor A_m;
//  * the final pressure read-out removes one half-step PML factor, i.e. uses
//    A_m^{-1} sigma instead of sigma.
//
// State reuses the forward StateLayout; the velocity block holds the single
// (not branch-split) adjoint velocity _m v_i.
class AdjointSolver {
 public:
  AdjointSolver(const Grid& g, const Medium& med, const PmlProfile& pml,
                const SpectralOps& ops);

  // Order-reversed adjoint data: ns x (nt+1) series with
  //   Q_0 = P_{nt-1},  Q_k = P_{nt-k} + P_{nt-k-1} (k=1..nt-1),  Q_nt = P_0,
  // all divided by 2 dt. Entry k drives time step n = k-1; the trailing
  // entry is defined for completeness but never consumed by run().
  TimeSeries prepare_adjoint_data(const TimeSeries& data) const;

  // One step (velocity update, absorption correction, stress update, source).
  // src is the grid-scattered adjoint data for this step, or null.
  void step(WaveState& st, const Field* src);

  // Full backward-in-physical-time run; returns p0* on the grid.
  Field run(const TimeSeries& data, const SensorArray& sensors,
            double instability_factor = 10.0);

 private:
  // Weighted driver fields of Eqs. cvx/cvx2 for branch b:
  //   p_lin[i] = sum_j [ d_i^+(lambda _i sig_jj) + 2 d_j^{h(i,j)}(mu_ij _j sig_ij) ]
  //   p_vis[i] = same with chi / eta.
  void drivers(const WaveState& st, int b, std::vector<Field>& p_lin,
               std::vector<Field>& p_vis);

  const Grid& g_;
  const Medium& med_;
  const PmlProfile& pml_;
  const SpectralOps& ops_;
  StateLayout layout_;
  Fft fft_;
  std::size_t n_;

  std::vector<cplx> spec_, scratch_;
  Field sum_, tmp_, tmp2_;
  std::vector<Field> r_, pre_, q_;                // [i]
  std::array<std::vector<Field>, 2> cb_;          // [b][i] absorption terms
  std::vector<Field> vbold_;                      // [m*d+i]
  std::vector<std::vector<cplx>> specv_;
};

}  // namespace vispat
