#pragma once

#include <functional>

#include "core/medium.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"
#include "core/spectral.hpp"
#include "solver/state.hpp"

namespace vispat {

struct RunOptions {
  double instability_factor = 10.0;  // per-step norm growth abort threshold
  int snapshot_stride = 0;           // emit pressure snapshots every k steps
  std::function<void(int step, const Field& p)> snapshot_cb;
};

// Time-stepping forward solver (section 4.1 steps 1-5): staggered k-space
// pseudo-spectral update of the PML-split velocity and p/s-split stress
// fields with fractional-Laplacian absorption, plus sensor recording.
//
// A solver owns its scratch state and is not safe for concurrent use;
// create independent instances to parallelize.
class ForwardSolver {
 public:
  ForwardSolver(const Grid& g, const Medium& med, const PmlProfile& pml,
                const SpectralOps& ops);

  const StateLayout& layout() const { return layout_; }

  // Applies the smoothing operator S once; the result is what gets injected
  // (scaled by -1/(2d) per diagonal slot) during the two source steps.
  Field build_source(const Field& p0);

  // One step of Eqs. num-vel/spl2/num-s/s2. When smoothed_p0 is non-null the
  // additive source dt * (-S P0 / (2 d dt)) is added to every p-branch
  // diagonal stress slot.
  void step(WaveState& st, const Field* smoothed_p0);

  // p = -(1/d) sum_{l,m} sigma^p_{(ll),m}
  Field pressure(const WaveState& st) const;

  // Full run: n = -1 .. N_t-2 from zero initial conditions, recording
  // P_hat_{n+1} = M W p after each step.
  TimeSeries run(const Field& p0, const SensorArray& sensors,
                 const RunOptions& opts = {});

 private:
  void compute_pair_derivs(const WaveState& st);

  const Grid& g_;
  const Medium& med_;
  const PmlProfile& pml_;
  const SpectralOps& ops_;
  StateLayout layout_;
  Fft fft_;
  std::size_t n_;
  bool has_loss_;

  // scratch
  Field sum_;
  std::vector<cplx> spec_, scratch_;
  std::array<std::vector<Field>, 2> gbuf_;   // [b][i*d+m]: d/dx_m sums
  std::array<std::vector<Field>, 2> vdot_;   // [b][i]
  std::vector<Field> vsum_;                  // [i]
  std::array<std::vector<Field>, 2> vb_;     // [b][i]: v^p, v^s
  std::array<std::vector<Field>, 2> Gb_;     // [b][i]: dispersion-absorption aux
  std::vector<std::vector<cplx>> specv_, specg_;
  std::vector<Field> dva_, dga_;
  Field tmp_, tmp2_;
};

}  // namespace vispat
