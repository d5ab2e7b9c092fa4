#include "solver/forward.hpp"

#include <cmath>

namespace vispat {

ForwardSolver::ForwardSolver(const Grid& g, const Medium& med,
                             const PmlProfile& pml, const SpectralOps& ops)
    : g_(g), med_(med), pml_(pml), ops_(ops), layout_(g.d), fft_(g),
      n_(g.npoints()) {
  has_loss_ = false;
  for (std::size_t i = 0; i < n_; ++i) {
    if (med.chi[i] != 0.0 || med.eta[i] != 0.0) {
      has_loss_ = true;
      break;
    }
  }
  const int d = g.d;
  sum_.resize(n_);
  spec_.resize(n_);
  scratch_.resize(2 * n_);
  for (int b = 0; b < 2; ++b) {
    gbuf_[b].assign(d * d, Field(n_));
    vdot_[b].assign(d, Field(n_));
    vb_[b].assign(d, Field(n_));
    Gb_[b].assign(d, Field(n_));
  }
  vsum_.assign(d, Field(n_));
  specv_.assign(d, std::vector<cplx>(n_));
  specg_.assign(d, std::vector<cplx>(n_));
  dva_.assign(d, Field(n_));
  dga_.assign(d, Field(n_));
  tmp_.resize(n_);
  tmp2_.resize(n_);
}

Field ForwardSolver::build_source(const Field& p0) {
  if (p0.size() != n_) throw ShapeError("build_source: P0 size mismatch");
  return ops_.smooth(fft_, p0);
}

// For every unordered pair (i,j) and branch b, computes the staggered
// k-space derivative of the slot-summed stress sigma^b_(ij) along the
// axis/shift demanded by the velocity update (Eq. num-vel):
// gbuf[b][i*d+m] = d_{p,s}/dx_m^{h(i,m)} sum_slots sigma^b_(im).
void ForwardSolver::compute_pair_derivs(const WaveState& st) {
  const int d = g_.d;
  const WaveMode modes[2] = {WaveMode::P, WaveMode::S};
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      std::fill(sum_.begin(), sum_.end(), 0.0);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const double* f = st.field(layout_.stress_field(b, c, sp));
        for (std::size_t z = 0; z < n_; ++z) sum_[z] += f[z];
      }
      ops_.to_spectrum(fft_, sum_.data(), spec_.data());
      if (sc.i == sc.j) {
        // velocity i, axis i, shift h(i,i) = +
        ops_.deriv_from_spectrum(fft_, spec_.data(), sc.i, Shift::Plus,
                                 modes[b], gbuf_[b][sc.i * d + sc.i].data(),
                                 scratch_.data());
      } else {
        // velocity i along axis j and velocity j along axis i, shift -
        ops_.deriv_from_spectrum(fft_, spec_.data(), sc.j, Shift::Minus,
                                 modes[b], gbuf_[b][sc.i * d + sc.j].data(),
                                 scratch_.data());
        ops_.deriv_from_spectrum(fft_, spec_.data(), sc.i, Shift::Minus,
                                 modes[b], gbuf_[b][sc.j * d + sc.i].data(),
                                 scratch_.data());
      }
    }
  }
}

void ForwardSolver::step(WaveState& st, const Field* smoothed_p0) {
  const int d = g_.d;
  const double dt = g_.dt;
  const WaveMode modes[2] = {WaveMode::P, WaveMode::S};

  // 1. velocity update (num-vel) and the stress-rate fields (num-s2)
  compute_pair_derivs(st);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < d; ++i)
      std::fill(vdot_[b][i].begin(), vdot_[b][i].end(), 0.0);
  for (int i = 0; i < d; ++i) {
    const Field& rho = med_.rho_st[i];
    for (int m = 0; m < d; ++m) {
      const Field& A = pml_.a_half[m];
      double* v = st.field(layout_.vel_field(m, i));
      const double* g0 = gbuf_[0][i * d + m].data();
      const double* g1 = gbuf_[1][i * d + m].data();
      for (std::size_t z = 0; z < n_; ++z) {
        const double drive = dt / rho[z] * (g0[z] + g1[z]);
        v[z] = A[z] * (A[z] * v[z] + drive);
        vdot_[0][i][z] += A[z] * g0[z] / rho[z];
        vdot_[1][i][z] += A[z] * g1[z] / rho[z];
      }
    }
  }

  // 2. split v = sum_m (_m v) into compressional and shear parts (spl2)
  std::vector<const cplx*> specp(d);
  std::vector<double*> vpp(d);
  for (int i = 0; i < d; ++i) {
    std::fill(vsum_[i].begin(), vsum_[i].end(), 0.0);
    for (int m = 0; m < d; ++m) {
      const double* v = st.field(layout_.vel_field(m, i));
      for (std::size_t z = 0; z < n_; ++z) vsum_[i][z] += v[z];
    }
    ops_.to_spectrum(fft_, vsum_[i].data(), specv_[i].data());
    specp[i] = specv_[i].data();
    vpp[i] = vb_[0][i].data();
  }
  ops_.split_p_from_spectra(fft_, specp.data(), vpp.data(), scratch_.data());
  for (int i = 0; i < d; ++i)
    for (std::size_t z = 0; z < n_; ++z)
      vb_[1][i][z] = vsum_[i][z] - vb_[0][i][z];

  // 3. stress update (num-s); G = tau_dis Ydis v - tau_abs Yabs dv/dt
  for (int b = 0; b < 2; ++b) {
    if (has_loss_) {
      for (int i = 0; i < d; ++i) {
        const Field& tdis = med_.tau_st[b][0][i];
        const Field& tabs = med_.tau_st[b][1][i];
        ops_.to_spectrum(fft_, vb_[b][i].data(), spec_.data());
        ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Dis, tmp_.data(),
                                scratch_.data());
        ops_.to_spectrum(fft_, vdot_[b][i].data(), spec_.data());
        ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Abs, tmp2_.data(),
                                scratch_.data());
        for (std::size_t z = 0; z < n_; ++z)
          Gb_[b][i][z] = tdis[z] * tmp_[z] - tabs[z] * tmp2_[z];
      }
    }
    for (int i = 0; i < d; ++i) {
      ops_.to_spectrum(fft_, vb_[b][i].data(), specv_[i].data());
      ops_.deriv_from_spectrum(fft_, specv_[i].data(), i, Shift::Minus,
                               modes[b], dva_[i].data(), scratch_.data());
      if (has_loss_) {
        ops_.to_spectrum(fft_, Gb_[b][i].data(), specg_[i].data());
        ops_.deriv_from_spectrum(fft_, specg_[i].data(), i, Shift::Minus,
                                 modes[b], dga_[i].data(), scratch_.data());
      }
    }
    // diagonal components: slot m gets lambda dv_m + chi dG_m, plus the
    // 2 mu dv_i + 2 eta dG_i shear term on its own direction m == i
    for (int i = 0; i < d; ++i) {
      const int c = layout_.comp_of(i, i);
      for (int m = 0; m < d; ++m) {
        const Field& A = pml_.a_half[m];
        double* s = st.field(layout_.stress_field(b, c, layout_.slot_pos(c, m)));
        for (std::size_t z = 0; z < n_; ++z) {
          double delta = med_.lambda[z] * dva_[m][z];
          if (has_loss_) delta += med_.chi[z] * dga_[m][z];
          if (m == i) {
            delta += 2.0 * med_.mu[z] * dva_[i][z];
            if (has_loss_) delta += 2.0 * med_.eta[z] * dga_[i][z];
          }
          s[z] = A[z] * (A[z] * s[z] + dt * delta);
        }
      }
    }
    // off-diagonal components (i<j): slot j from d/dx_j^+ of component i,
    // slot i from d/dx_i^+ of component j
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const int c = layout_.comp_of(i, j);
        const Field& mu = med_.mu_st[pair_index(i, j)];
        const Field& eta = med_.eta_st[pair_index(i, j)];
        for (int pass = 0; pass < 2; ++pass) {
          const int m = pass == 0 ? j : i;      // slot / derivative axis
          const int comp = pass == 0 ? i : j;   // velocity component
          ops_.deriv_from_spectrum(fft_, specv_[comp].data(), m, Shift::Plus,
                                   modes[b], tmp_.data(), scratch_.data());
          if (has_loss_)
            ops_.deriv_from_spectrum(fft_, specg_[comp].data(), m, Shift::Plus,
                                     modes[b], tmp2_.data(), scratch_.data());
          const Field& A = pml_.a_half[m];
          double* s = st.field(layout_.stress_field(b, c, layout_.slot_pos(c, m)));
          for (std::size_t z = 0; z < n_; ++z) {
            double delta = mu[z] * tmp_[z];
            if (has_loss_) delta += eta[z] * tmp2_[z];
            s[z] = A[z] * (A[z] * s[z] + dt * delta);
          }
        }
      }
    }
  }

  // 4. additive source (s1/s2): dt * (-S P0 / (2 d dt)) into every p-branch
  // diagonal slot
  if (smoothed_p0) {
    const double scale = -1.0 / (2.0 * d);
    const double* src = smoothed_p0->data();
    for (int i = 0; i < d; ++i) {
      const int c = layout_.comp_of(i, i);
      for (int m = 0; m < d; ++m) {
        double* s = st.field(layout_.stress_field(0, c, layout_.slot_pos(c, m)));
        for (std::size_t z = 0; z < n_; ++z) s[z] += scale * src[z];
      }
    }
  }
}

Field ForwardSolver::pressure(const WaveState& st) const {
  const int d = g_.d;
  Field p(n_, 0.0);
  for (int i = 0; i < d; ++i) {
    const int c = layout_.comp_of(i, i);
    for (int sp = 0; sp < d; ++sp) {
      const double* s = st.field(layout_.stress_field(0, c, sp));
      for (std::size_t z = 0; z < n_; ++z) p[z] += s[z];
    }
  }
  const double scale = -1.0 / d;
  for (std::size_t z = 0; z < n_; ++z) p[z] *= scale;
  return p;
}

TimeSeries ForwardSolver::run(const Field& p0, const SensorArray& sensors,
                              const RunOptions& opts) {
  if (p0.size() != n_) throw ShapeError("run_forward: P0 size mismatch");
  const Field src = build_source(p0);
  WaveState st;
  st.init(layout_, n_);
  TimeSeries ts;
  ts.ns = sensors.count();
  ts.nt = g_.nt;
  ts.dt = g_.dt;
  ts.data.assign(static_cast<std::size_t>(ts.ns) * ts.nt, 0.0);
  std::vector<double> sample(ts.ns);
  double prev_norm = 0.0;
  for (int n = -1; n <= g_.nt - 2; ++n) {
    step(st, n <= 0 ? &src : nullptr);
    double nrm = 0.0;
    for (double v : st.x) nrm += v * v;
    if (!std::isfinite(nrm))
      throw NumericalError("run_forward: non-finite field at step " +
                           std::to_string(n + 1));
    if (prev_norm > 0.0 && nrm > opts.instability_factor * opts.instability_factor * prev_norm)
      throw NumericalError("run_forward: instability detected at step " +
                           std::to_string(n + 1));
    prev_norm = std::max(prev_norm, nrm);
    Field p = pressure(st);
    sensors.sample(p.data(), sample.data());
    for (int s = 0; s < ts.ns; ++s) ts.at(s, n + 1) = sample[s];
    if (opts.snapshot_stride > 0 && opts.snapshot_cb &&
        (n + 1) % opts.snapshot_stride == 0)
      opts.snapshot_cb(n + 1, p);
  }
  return ts;
}

}  // namespace vispat
