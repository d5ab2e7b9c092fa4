#include "solver/discrete_adjoint.hpp"

#include <cmath>

namespace vispat {

namespace {
const WaveMode kModes[2] = {WaveMode::P, WaveMode::S};
}

DiscreteAdjoint::DiscreteAdjoint(const Grid& g, const Medium& med,
                                 const PmlProfile& pml, const SpectralOps& ops)
    : g_(g), med_(med), pml_(pml), ops_(ops), layout_(g.d), fft_(g),
      n_(g.npoints()) {
  const int d = g.d;
  spec_.resize(n_);
  scratch_.resize(2 * n_);
  sum_.resize(n_);
  tmp_.resize(n_);
  tmp2_.resize(n_);
  velbuf_.assign(d * d, Field(n_));
  velbuf2_.assign(d * d, Field(n_));
  for (int b = 0; b < 2; ++b) cbuf_[b].assign(d, Field(n_));
  specv_.assign(d, std::vector<cplx>(n_));
  fbuf_.assign(3 * d, Field(n_));  // [0..d): r, [d..2d): p_lin, [2d..3d): p_vis
}

// out_vel[m*d+i] = (dt / rho_i) sum_b d^b/dx_m^{h(i,m)} (slot sum of sig^b_(im))
void DiscreteAdjoint::phi_apply(const WaveState& sig, std::vector<Field>& out_vel) {
  const int d = g_.d;
  const double dt = g_.dt;
  for (auto& f : out_vel) std::fill(f.begin(), f.end(), 0.0);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      std::fill(sum_.begin(), sum_.end(), 0.0);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const double* f = sig.field(layout_.stress_field(b, c, sp));
        for (std::size_t z = 0; z < n_; ++z) sum_[z] += f[z];
      }
      ops_.to_spectrum(fft_, sum_.data(), spec_.data());
      if (sc.i == sc.j) {
        ops_.deriv_from_spectrum(fft_, spec_.data(), sc.i, Shift::Plus,
                                 kModes[b], tmp_.data(), scratch_.data());
        const Field& rho = med_.rho_st[sc.i];
        double* out = out_vel[sc.i * d + sc.i].data();
        for (std::size_t z = 0; z < n_; ++z) out[z] += dt / rho[z] * tmp_[z];
      } else {
        for (int pass = 0; pass < 2; ++pass) {
          const int i = pass == 0 ? sc.i : sc.j;  // velocity component
          const int m = pass == 0 ? sc.j : sc.i;  // derivative axis / slot
          ops_.deriv_from_spectrum(fft_, spec_.data(), m, Shift::Minus,
                                   kModes[b], tmp_.data(), scratch_.data());
          const Field& rho = med_.rho_st[i];
          double* out = out_vel[m * d + i].data();
          for (std::size_t z = 0; z < n_; ++z) out[z] += dt / rho[z] * tmp_[z];
        }
      }
    }
  }
}

void DiscreteAdjoint::phi_prime_adj(const std::vector<Field>& w, int b,
                                    WaveState& out_sig, bool accumulate) {
  const int d = g_.d;
  const double dt = g_.dt;
  if (!accumulate)
    std::fill(out_sig.x.begin(), out_sig.x.end(), 0.0);
  for (int i = 0; i < d; ++i) {
    // diagonal (i,i): -dt d_i^- ((1/rho_i) _i w_i), identical in every slot
    const Field& rho = med_.rho_st[i];
    for (std::size_t z = 0; z < n_; ++z) tmp_[z] = w[i * d + i][z] / rho[z];
    ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
    ops_.deriv_from_spectrum(fft_, spec_.data(), i, Shift::Minus, kModes[b],
                             tmp2_.data(), scratch_.data());
    const int c = layout_.comp_of(i, i);
    for (int sp = 0; sp < d; ++sp) {
      double* s = out_sig.field(layout_.stress_field(b, c, sp));
      for (std::size_t z = 0; z < n_; ++z) s[z] -= dt * tmp2_[z];
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      // off-diagonal (i,j): -dt [ d_j^+ ((1/rho_i) _j w_i)
      //                         + d_i^+ ((1/rho_j) _i w_j) ], both slots
      std::fill(sum_.begin(), sum_.end(), 0.0);
      for (int pass = 0; pass < 2; ++pass) {
        const int vi = pass == 0 ? i : j;  // velocity component
        const int ax = pass == 0 ? j : i;  // slot of w / derivative axis
        const Field& rho = med_.rho_st[vi];
        for (std::size_t z = 0; z < n_; ++z)
          tmp_[z] = w[ax * d + vi][z] / rho[z];
        ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
        ops_.deriv_from_spectrum(fft_, spec_.data(), ax, Shift::Plus, kModes[b],
                                 tmp2_.data(), scratch_.data());
        for (std::size_t z = 0; z < n_; ++z) sum_[z] += tmp2_[z];
      }
      const int c = layout_.comp_of(i, j);
      for (int sp = 0; sp < 2; ++sp) {
        double* s = out_sig.field(layout_.stress_field(b, c, sp));
        for (std::size_t z = 0; z < n_; ++z) s[z] -= dt * sum_[z];
      }
    }
  }
}

void DiscreteAdjoint::split_q(int b, const std::vector<Field>& in,
                              std::vector<Field>& out) {
  const int d = g_.d;
  std::vector<const cplx*> specp(d);
  std::vector<double*> outp(d);
  for (int i = 0; i < d; ++i) {
    ops_.to_spectrum(fft_, in[i].data(), specv_[i].data());
    specp[i] = specv_[i].data();
    outp[i] = out[i].data();
  }
  ops_.split_p_from_spectra(fft_, specp.data(), outp.data(), scratch_.data());
  if (b == 1) {
    for (int i = 0; i < d; ++i)
      for (std::size_t z = 0; z < n_; ++z) out[i][z] = in[i][z] - out[i][z];
  }
}

void DiscreteAdjoint::psi_dis_apply(const std::vector<Field>& vel,
                                    WaveState& out_sig) {
  const int d = g_.d;
  const double dt = g_.dt;
  std::fill(out_sig.x.begin(), out_sig.x.end(), 0.0);
  // v_i = sum_m (_m v_i), then w^b = Q^b v
  std::vector<Field>& vsum = fbuf_;  // reuse first d entries
  for (int i = 0; i < d; ++i) {
    std::fill(vsum[i].begin(), vsum[i].end(), 0.0);
    for (int m = 0; m < d; ++m)
      for (std::size_t z = 0; z < n_; ++z) vsum[i][z] += vel[m * d + i][z];
  }
  std::vector<Field> wb(d, Field(n_));
  for (int b = 0; b < 2; ++b) {
    split_q(b, vsum, wb);
    // e_i = tau_dis,i Ydis w_i
    std::vector<Field> e(d, Field(n_));
    for (int i = 0; i < d; ++i) {
      ops_.to_spectrum(fft_, wb[i].data(), spec_.data());
      ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Dis, tmp_.data(),
                              scratch_.data());
      const Field& tdis = med_.tau_st[b][0][i];
      for (std::size_t z = 0; z < n_; ++z) e[i][z] = tdis[z] * tmp_[z];
    }
    // stress-shaped increment with v -> w (lambda, mu) and G -> e (chi, eta)
    std::vector<Field> dva(d, Field(n_)), dea(d, Field(n_));
    for (int i = 0; i < d; ++i) {
      ops_.to_spectrum(fft_, wb[i].data(), specv_[i].data());
      ops_.deriv_from_spectrum(fft_, specv_[i].data(), i, Shift::Minus,
                               kModes[b], dva[i].data(), scratch_.data());
    }
    std::vector<std::vector<cplx>> spece(d, std::vector<cplx>(n_));
    for (int i = 0; i < d; ++i) {
      ops_.to_spectrum(fft_, e[i].data(), spece[i].data());
      ops_.deriv_from_spectrum(fft_, spece[i].data(), i, Shift::Minus,
                               kModes[b], dea[i].data(), scratch_.data());
    }
    for (int i = 0; i < d; ++i) {
      const int c = layout_.comp_of(i, i);
      for (int m = 0; m < d; ++m) {
        double* s = out_sig.field(layout_.stress_field(b, c, m));
        for (std::size_t z = 0; z < n_; ++z) {
          double delta = med_.lambda[z] * dva[m][z] + med_.chi[z] * dea[m][z];
          if (m == i)
            delta += 2.0 * med_.mu[z] * dva[i][z] + 2.0 * med_.eta[z] * dea[i][z];
          s[z] = dt * delta;
        }
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const int c = layout_.comp_of(i, j);
        const Field& mu = med_.mu_st[pair_index(i, j)];
        const Field& eta = med_.eta_st[pair_index(i, j)];
        for (int pass = 0; pass < 2; ++pass) {
          const int m = pass == 0 ? j : i;
          const int comp = pass == 0 ? i : j;
          ops_.deriv_from_spectrum(fft_, specv_[comp].data(), m, Shift::Plus,
                                   kModes[b], tmp_.data(), scratch_.data());
          ops_.deriv_from_spectrum(fft_, spece[comp].data(), m, Shift::Plus,
                                   kModes[b], tmp2_.data(), scratch_.data());
          double* s = out_sig.field(
              layout_.stress_field(b, c, layout_.slot_pos(c, m)));
          for (std::size_t z = 0; z < n_; ++z)
            s[z] = dt * (mu[z] * tmp_[z] + eta[z] * tmp2_[z]);
        }
      }
    }
  }
}

void DiscreteAdjoint::psi_abs_apply(const WaveState& sig, WaveState& out_sig) {
  const int d = g_.d;
  const double dt = g_.dt;
  std::fill(out_sig.x.begin(), out_sig.x.end(), 0.0);
  for (int b = 0; b < 2; ++b) {
    // dv/dt per num-s2: sum_m A_m (1/rho_i) d^b/dx_m^{h(i,m)} slot-sum
    std::vector<Field> vdot(d, Field(n_, 0.0));
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      std::fill(sum_.begin(), sum_.end(), 0.0);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const double* f = sig.field(layout_.stress_field(b, c, sp));
        for (std::size_t z = 0; z < n_; ++z) sum_[z] += f[z];
      }
      ops_.to_spectrum(fft_, sum_.data(), spec_.data());
      const int npass = sc.i == sc.j ? 1 : 2;
      for (int pass = 0; pass < npass; ++pass) {
        const int i = pass == 0 ? sc.i : sc.j;
        const int m = pass == 0 ? sc.j : sc.i;
        ops_.deriv_from_spectrum(fft_, spec_.data(), m,
                                 i == m ? Shift::Plus : Shift::Minus, kModes[b],
                                 tmp_.data(), scratch_.data());
        const Field& rho = med_.rho_st[i];
        const Field& A = pml_.a_half[m];
        for (std::size_t z = 0; z < n_; ++z)
          vdot[i][z] += A[z] * tmp_[z] / rho[z];
      }
    }
    // a_i = tau_abs,i Yabs vdot_i; increment uses chi/eta only
    std::vector<Field> a(d, Field(n_));
    std::vector<Field> daa(d, Field(n_));
    std::vector<std::vector<cplx>> speca(d, std::vector<cplx>(n_));
    for (int i = 0; i < d; ++i) {
      ops_.to_spectrum(fft_, vdot[i].data(), spec_.data());
      ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Abs, tmp_.data(),
                              scratch_.data());
      const Field& tabs = med_.tau_st[b][1][i];
      for (std::size_t z = 0; z < n_; ++z) a[i][z] = tabs[z] * tmp_[z];
      ops_.to_spectrum(fft_, a[i].data(), speca[i].data());
      ops_.deriv_from_spectrum(fft_, speca[i].data(), i, Shift::Minus,
                               kModes[b], daa[i].data(), scratch_.data());
    }
    for (int i = 0; i < d; ++i) {
      const int c = layout_.comp_of(i, i);
      for (int m = 0; m < d; ++m) {
        double* s = out_sig.field(layout_.stress_field(b, c, m));
        for (std::size_t z = 0; z < n_; ++z) {
          double delta = med_.chi[z] * daa[m][z];
          if (m == i) delta += 2.0 * med_.eta[z] * daa[i][z];
          s[z] = dt * delta;
        }
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const int c = layout_.comp_of(i, j);
        const Field& eta = med_.eta_st[pair_index(i, j)];
        for (int pass = 0; pass < 2; ++pass) {
          const int m = pass == 0 ? j : i;
          const int comp = pass == 0 ? i : j;
          ops_.deriv_from_spectrum(fft_, speca[comp].data(), m, Shift::Plus,
                                   kModes[b], tmp_.data(), scratch_.data());
          double* s = out_sig.field(
              layout_.stress_field(b, c, layout_.slot_pos(c, m)));
          for (std::size_t z = 0; z < n_; ++z) s[z] = dt * eta[z] * tmp_[z];
        }
      }
    }
  }
}

void DiscreteAdjoint::apply_T(const WaveState& in, WaveState& out) {
  const int d = g_.d;
  out.init(layout_, n_);
  // right factor: u_v = Av^2 v + Av Phi sigma
  phi_apply(in, velbuf_);
  for (int m = 0; m < d; ++m) {
    const Field& A = pml_.a_half[m];
    for (int i = 0; i < d; ++i) {
      const double* v = in.field(layout_.vel_field(m, i));
      double* o = out.field(layout_.vel_field(m, i));
      const double* ph = velbuf_[m * d + i].data();
      for (std::size_t z = 0; z < n_; ++z) o[z] = A[z] * (A[z] * v[z] + ph[z]);
    }
  }
  // left factor: sigma' = As (As sigma + Psi_dis u_v - Psi_abs sigma)
  std::vector<Field> uvel(d * d, Field(n_));
  for (int m = 0; m < d; ++m)
    for (int i = 0; i < d; ++i) {
      const double* o = out.field(layout_.vel_field(m, i));
      std::copy(o, o + n_, uvel[m * d + i].begin());
    }
  WaveState sdis, sabs;
  sdis.init(layout_, n_);
  sabs.init(layout_, n_);
  psi_dis_apply(uvel, sdis);
  psi_abs_apply(in, sabs);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const int f = layout_.stress_field(b, c, sp);
        const Field& A = pml_.a_half[sc.slots[sp]];
        const double* s = in.field(f);
        const double* pd = sdis.field(f);
        const double* pa = sabs.field(f);
        double* o = out.field(f);
        for (std::size_t z = 0; z < n_; ++z)
          o[z] = A[z] * (A[z] * s[z] + pd[z] - pa[z]);
      }
    }
  }
}

// Shared adjoint driver fields for branch b:
//   p_lin[i] = d_i^+(lambda * ds_i) + 2 d_i^+(mu * _i sig_ii)
//              + sum_{j != i} d_j^-(mu_ij * _j sig_ij)
//   p_vis[i] = same with chi / eta,
// where ds_i = sum_j (_i sig_jj) (slot i of every diagonal component; the
// diagonal full-slot storage is what makes this well defined for all i).
void DiscreteAdjoint::adj_drivers(const WaveState& sig, int b,
                                  std::vector<Field>& p_lin,
                                  std::vector<Field>& p_vis) {
  const int d = g_.d;
  for (int i = 0; i < d; ++i) {
    Field& ds = sum_;
    std::fill(ds.begin(), ds.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      const int c = layout_.comp_of(j, j);
      const double* s = sig.field(layout_.stress_field(b, c, layout_.slot_pos(c, i)));
      for (std::size_t z = 0; z < n_; ++z) ds[z] += s[z];
    }
    const int cii = layout_.comp_of(i, i);
    const double* sii =
        sig.field(layout_.stress_field(b, cii, layout_.slot_pos(cii, i)));
    // lambda * ds + 2 mu * sig_ii combined into one transform (same axis/shift)
    for (std::size_t z = 0; z < n_; ++z)
      tmp_[z] = med_.lambda[z] * ds[z] + 2.0 * med_.mu[z] * sii[z];
    ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
    ops_.deriv_from_spectrum(fft_, spec_.data(), i, Shift::Plus, kModes[b],
                             p_lin[i].data(), scratch_.data());
    for (std::size_t z = 0; z < n_; ++z)
      tmp_[z] = med_.chi[z] * ds[z] + 2.0 * med_.eta[z] * sii[z];
    ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
    ops_.deriv_from_spectrum(fft_, spec_.data(), i, Shift::Plus, kModes[b],
                             p_vis[i].data(), scratch_.data());
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const int c = layout_.comp_of(i, j);
      const Field& mu = med_.mu_st[pair_index(std::min(i, j), std::max(i, j))];
      const Field& eta = med_.eta_st[pair_index(std::min(i, j), std::max(i, j))];
      const double* sij =
          sig.field(layout_.stress_field(b, c, layout_.slot_pos(c, j)));
      for (std::size_t z = 0; z < n_; ++z) tmp_[z] = mu[z] * sij[z];
      ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
      ops_.deriv_from_spectrum(fft_, spec_.data(), j, Shift::Minus, kModes[b],
                               tmp2_.data(), scratch_.data());
      for (std::size_t z = 0; z < n_; ++z) p_lin[i][z] += tmp2_[z];
      for (std::size_t z = 0; z < n_; ++z) tmp_[z] = eta[z] * sij[z];
      ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
      ops_.deriv_from_spectrum(fft_, spec_.data(), j, Shift::Minus, kModes[b],
                               tmp2_.data(), scratch_.data());
      for (std::size_t z = 0; z < n_; ++z) p_vis[i][z] += tmp2_[z];
    }
  }
}

// r_i = -dt sum_b Q^b [ p_lin + Ydis(tau_dis,i * p_vis) ]_i, broadcast over m.
// Also caches c^b_i = Yabs(tau_abs,i * p_vis_i) for the absorption block.
void DiscreteAdjoint::psi_dis_adj(const WaveState& sig,
                                  std::vector<Field>& out_vel) {
  const int d = g_.d;
  const double dt = g_.dt;
  std::vector<Field> r(d, Field(n_, 0.0));
  std::vector<Field> pre(d, Field(n_));
  std::vector<Field> q(d, Field(n_));
  for (int b = 0; b < 2; ++b) {
    std::vector<Field> p_lin(d, Field(n_)), p_vis(d, Field(n_));
    adj_drivers(sig, b, p_lin, p_vis);
    for (int i = 0; i < d; ++i) {
      const Field& tdis = med_.tau_st[b][0][i];
      for (std::size_t z = 0; z < n_; ++z) tmp_[z] = tdis[z] * p_vis[i][z];
      ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
      ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Dis, tmp2_.data(),
                              scratch_.data());
      for (std::size_t z = 0; z < n_; ++z) pre[i][z] = p_lin[i][z] + tmp2_[z];
      // absorption-correction companion c^b_i
      const Field& tabs = med_.tau_st[b][1][i];
      for (std::size_t z = 0; z < n_; ++z) tmp_[z] = tabs[z] * p_vis[i][z];
      ops_.to_spectrum(fft_, tmp_.data(), spec_.data());
      ops_.frac_from_spectrum(fft_, spec_.data(), FracKind::Abs,
                              cbuf_[b][i].data(), scratch_.data());
    }
    split_q(b, pre, q);
    for (int i = 0; i < d; ++i)
      for (std::size_t z = 0; z < n_; ++z) r[i][z] += q[i][z];
  }
  for (int m = 0; m < d; ++m)
    for (int i = 0; i < d; ++i)
      for (std::size_t z = 0; z < n_; ++z)
        out_vel[m * d + i][z] = -dt * r[i][z];
}

void DiscreteAdjoint::apply_T_star(const WaveState& in, WaveState& out) {
  const int d = g_.d;
  out.init(layout_, n_);
  // asig = A_sigma in_sigma
  WaveState asig;
  asig.init(layout_, n_);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const int f = layout_.stress_field(b, c, sp);
        const Field& A = pml_.a_half[sc.slots[sp]];
        const double* s = in.field(f);
        double* o = asig.field(f);
        for (std::size_t z = 0; z < n_; ++z) o[z] = A[z] * s[z];
      }
    }
  }
  // u = v + Psi_dis^T asig   (also fills cbuf_ with c^b)
  psi_dis_adj(asig, velbuf_);
  for (int m = 0; m < d; ++m)
    for (int i = 0; i < d; ++i) {
      const double* v = in.field(layout_.vel_field(m, i));
      Field& u = velbuf_[m * d + i];
      for (std::size_t z = 0; z < n_; ++z) u[z] += v[z];
    }
  // v' = Av^2 u
  for (int m = 0; m < d; ++m) {
    const Field& A = pml_.a_half[m];
    for (int i = 0; i < d; ++i) {
      double* o = out.field(layout_.vel_field(m, i));
      const Field& u = velbuf_[m * d + i];
      for (std::size_t z = 0; z < n_; ++z) o[z] = A[z] * A[z] * u[z];
    }
  }
  // sigma' = Phi'^T_b( A_v (u + c^b) ) + A_sigma^2 sigma, per branch: the
  // -Psi_abs^* A_sigma term collapses to +Phi'^T A_v c^b since the dt of
  // Psi'^*_abs cancels the 1/dt of Psi^*_abs = (1/dt) Phi'^* A_v Psi'^*_abs
  for (int b = 0; b < 2; ++b) {
    for (int m = 0; m < d; ++m) {
      const Field& A = pml_.a_half[m];
      for (int i = 0; i < d; ++i) {
        Field& w = velbuf2_[m * d + i];
        const Field& u = velbuf_[m * d + i];
        const Field& c = cbuf_[b][i];
        for (std::size_t z = 0; z < n_; ++z) w[z] = A[z] * (u[z] + c[z]);
      }
    }
    phi_prime_adj(velbuf2_, b, out, /*accumulate=*/true);
  }
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < layout_.ncomps(); ++c) {
      const StressComp& sc = layout_.comp(c);
      for (int sp = 0; sp < sc.nslots; ++sp) {
        const int f = layout_.stress_field(b, c, sp);
        const Field& A = pml_.a_half[sc.slots[sp]];
        const double* s = in.field(f);
        double* o = out.field(f);
        for (std::size_t z = 0; z < n_; ++z) o[z] += A[z] * A[z] * s[z];
      }
    }
  }
}

void DiscreteAdjoint::apply_M(const WaveState& st, const SensorArray& sensors,
                              double* out) const {
  const int d = g_.d;
  Field p(n_, 0.0);
  for (int i = 0; i < d; ++i) {
    const int c = layout_.comp_of(i, i);
    for (int sp = 0; sp < d; ++sp) {
      const double* s = st.field(layout_.stress_field(0, c, sp));
      for (std::size_t z = 0; z < n_; ++z) p[z] += s[z];
    }
  }
  for (std::size_t z = 0; z < n_; ++z) p[z] *= -1.0 / d;
  sensors.sample(p.data(), out);
}

void DiscreteAdjoint::apply_M_star(const double* in, const SensorArray& sensors,
                                   WaveState& st) const {
  const int d = g_.d;
  Field q(n_, 0.0);
  sensors.scatter_add(in, q.data(), -1.0 / d);
  for (int i = 0; i < d; ++i) {
    const int c = layout_.comp_of(i, i);
    for (int sp = 0; sp < d; ++sp) {
      double* s = st.field(layout_.stress_field(0, c, sp));
      for (std::size_t z = 0; z < n_; ++z) s[z] += q[z];
    }
  }
}

Field DiscreteAdjoint::run(const TimeSeries& data, const SensorArray& sensors) {
  const int d = g_.d;
  if (data.nt != g_.nt) throw ShapeError("run_discrete_adjoint: nt mismatch");
  if (data.ns != sensors.count())
    throw ShapeError("run_discrete_adjoint: sensor count mismatch");
  WaveState x, x2;
  x.init(layout_, n_);
  x2.init(layout_, n_);
  std::vector<double> col(data.ns);
  WaveState prev;  // X*_{N_t-2}
  prev.init(layout_, n_);
  for (int n = -1; n <= g_.nt - 2; ++n) {
    if (n == g_.nt - 2) prev.x = x.x;
    apply_T_star(x, x2);
    const int src = g_.nt - 2 - n;
    for (int s = 0; s < data.ns; ++s) col[s] = data.at(s, src);
    apply_M_star(col.data(), sensors, x2);
    std::swap(x.x, x2.x);
  }
  // p0* = -(1/(2d)) S [trace_p(X*_{N_t-1}) + trace_p(X*_{N_t-2})]
  Field tr(n_, 0.0);
  for (int i = 0; i < d; ++i) {
    const int c = layout_.comp_of(i, i);
    for (int sp = 0; sp < d; ++sp) {
      const double* a = x.field(layout_.stress_field(0, c, sp));
      const double* b = prev.field(layout_.stress_field(0, c, sp));
      for (std::size_t z = 0; z < n_; ++z) tr[z] += a[z] + b[z];
    }
  }
  const double scale = -1.0 / (2.0 * d);
  for (std::size_t z = 0; z < n_; ++z) tr[z] *= scale;
  return ops_.smooth(fft_, tr);
}

}  // namespace vispat
