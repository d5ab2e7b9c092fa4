#include "core/spectral.hpp"

#include <cmath>
#include <numbers>

namespace vispat {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-300) return 1.0;
  return std::sin(x) / x;
}

// Blackman taper as a function of normalized wavenumber x = k/k_nyquist.
// Unit gain at DC, zero at Nyquist, symmetric.
double blackman(double x) {
  const double pi = std::numbers::pi;
  return 0.42 + 0.5 * std::cos(pi * x) + 0.08 * std::cos(2.0 * pi * x);
}

}  // namespace

SpectralOps::SpectralOps(const Grid& g, double y) : g_(g), y_(y) {
  if (!(y > 0.0 && y < 2.0) || y == 1.0)
    throw ConfigError("spectral: power-law exponent y must be in (0,2), y != 1");
  npts_ = g.npoints();
  const double pi = std::numbers::pi;

  for (int a = 0; a < g.d; ++a) {
    const int na = g.n[a];
    deriv_mult_[a][0].resize(na);
    deriv_mult_[a][1].resize(na);
    shift_phase_[a].resize(na);
    for (int z = 0; z < na; ++z) {
      const double k = g.k_axis(a, z);
      const cplx ik(0.0, k);
      const cplx ph = std::exp(cplx(0.0, 0.5 * k * g.dx[a]));
      deriv_mult_[a][0][z] = ik * ph;             // shift +
      deriv_mult_[a][1][z] = ik * std::conj(ph);  // shift -
      shift_phase_[a][z] = ph;
    }
  }

  sinc_p_.resize(npts_);
  sinc_s_.resize(npts_);
  kfrac_dis_.resize(npts_);
  kfrac_abs_.resize(npts_);
  smooth_win_.resize(npts_);
  inv_k_.resize(npts_);
  proj_identity_.resize(npts_);

  std::size_t idx = 0;
  for (int z0 = 0; z0 < g.n[0]; ++z0) {
    const double k0 = g.k_axis(0, z0);
    const double x0 = std::abs(k0) * g.dx[0] / pi;
    for (int z1 = 0; z1 < g.n[1]; ++z1) {
      const double k1 = g.k_axis(1, z1);
      const double x1 = std::abs(k1) * g.dx[1] / pi;
      for (int z2 = 0; z2 < g.n[2]; ++z2, ++idx) {
        const double k2 = g.d == 3 ? g.k_axis(2, z2) : 0.0;
        const double kmag = std::sqrt(k0 * k0 + k1 * k1 + k2 * k2);
        sinc_p_[idx] = sinc(0.5 * g.c0p * kmag * g.dt);
        sinc_s_[idx] = sinc(0.5 * g.c0s * kmag * g.dt);
        if (kmag > 0.0) {
          kfrac_dis_[idx] = std::pow(kmag, y - 1.0);
          kfrac_abs_[idx] = std::pow(kmag, y - 2.0);
          inv_k_[idx] = 1.0 / kmag;
        } else {
          kfrac_dis_[idx] = 0.0;
          kfrac_abs_[idx] = 0.0;
          inv_k_[idx] = 0.0;
        }
        bool nyq = g.is_nyquist(0, z0) || g.is_nyquist(1, z1) ||
                   (g.d == 3 && g.is_nyquist(2, z2));
        proj_identity_[idx] = (kmag == 0.0 || nyq) ? 1 : 0;
        double w = blackman(x0) * blackman(x1);
        if (g.d == 3) w *= blackman(std::abs(k2) * g.dx[2] / pi);
        smooth_win_[idx] = w;
      }
    }
  }
}

void SpectralOps::to_spectrum(Fft& fft, const double* in, cplx* spec) const {
  fft.forward(in, spec);
}

void SpectralOps::deriv_from_spectrum(Fft& fft, const cplx* spec, int axis,
                                      Shift s, WaveMode mode, double* out,
                                      cplx* scratch) const {
  const auto& mult = deriv_mult_[axis][s == Shift::Plus ? 0 : 1];
  const double* snc = mode == WaveMode::P ? sinc_p_.data() : sinc_s_.data();
  std::size_t idx = 0;
  for (int z0 = 0; z0 < g_.n[0]; ++z0) {
    for (int z1 = 0; z1 < g_.n[1]; ++z1) {
      for (int z2 = 0; z2 < g_.n[2]; ++z2, ++idx) {
        const int za = axis == 0 ? z0 : (axis == 1 ? z1 : z2);
        scratch[idx] = spec[idx] * mult[za] * snc[idx];
      }
    }
  }
  fft.inverse_real(scratch, out);
}

void SpectralOps::frac_from_spectrum(Fft& fft, const cplx* spec, FracKind kind,
                                     double* out, cplx* scratch) const {
  const double* m = kind == FracKind::Dis ? kfrac_dis_.data() : kfrac_abs_.data();
  for (std::size_t i = 0; i < npts_; ++i) scratch[i] = spec[i] * m[i];
  fft.inverse_real(scratch, out);
}

void SpectralOps::smooth_from_spectrum(Fft& fft, const cplx* spec, double* out,
                                       cplx* scratch) const {
  for (std::size_t i = 0; i < npts_; ++i) scratch[i] = spec[i] * smooth_win_[i];
  fft.inverse_real(scratch, out);
}

void SpectralOps::split_p_from_spectra(Fft& fft, const cplx* const* vspec,
                                       double* const* vp_out,
                                       cplx* scratch) const {
  // scratch must hold 2N complex values.
  cplx* proj = scratch;          // a^H . v_hat accumulated per bin
  cplx* comp = scratch + npts_;  // one output component spectrum
  const int d = g_.d;

  // Q^p = a a^H with a_i = khat_i * e^{+i k_i dx_i/2} (staggered dyadic
  // tensor); |a| = 1 away from the identity bins, so Q^p is an exact
  // orthogonal projector bin by bin.
  std::size_t idx = 0;
  for (int z0 = 0; z0 < g_.n[0]; ++z0) {
    const double k0 = g_.k_axis(0, z0);
    for (int z1 = 0; z1 < g_.n[1]; ++z1) {
      const double k1 = g_.k_axis(1, z1);
      for (int z2 = 0; z2 < g_.n[2]; ++z2, ++idx) {
        if (proj_identity_[idx]) {
          proj[idx] = 0.0;
          continue;
        }
        const double ik = inv_k_[idx];
        cplx acc = std::conj(shift_phase_[0][z0]) * (k0 * ik) * vspec[0][idx];
        acc += std::conj(shift_phase_[1][z1]) * (k1 * ik) * vspec[1][idx];
        if (d == 3) {
          const double k2 = g_.k_axis(2, z2);
          acc += std::conj(shift_phase_[2][z2]) * (k2 * ik) * vspec[2][idx];
        }
        proj[idx] = acc;
      }
    }
  }

  for (int i = 0; i < d; ++i) {
    idx = 0;
    for (int z0 = 0; z0 < g_.n[0]; ++z0) {
      for (int z1 = 0; z1 < g_.n[1]; ++z1) {
        for (int z2 = 0; z2 < g_.n[2]; ++z2, ++idx) {
          if (proj_identity_[idx]) {
            comp[idx] = vspec[i][idx];
          } else {
            const int za = i == 0 ? z0 : (i == 1 ? z1 : z2);
            const double ka = g_.k_axis(i, za);
            comp[idx] = shift_phase_[i][za] * (ka * inv_k_[idx]) * proj[idx];
          }
        }
      }
    }
    fft.inverse_real(comp, vp_out[i]);
  }
}

void SpectralOps::check_field(const Field& f, const char* what) const {
  if (f.size() != npts_) throw ShapeError(std::string(what) + ": field size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i]))
      throw NumericalError(std::string(what) + ": non-finite value at index " +
                           std::to_string(i));
  }
}

Field SpectralOps::derivative(Fft& fft, const Field& in, int axis, Shift s,
                              WaveMode mode) const {
  check_field(in, "spectral_derivative");
  if (axis < 0 || axis >= g_.d) throw ConfigError("spectral_derivative: bad axis");
  std::vector<cplx> spec(npts_), scratch(npts_);
  Field out(npts_);
  to_spectrum(fft, in.data(), spec.data());
  deriv_from_spectrum(fft, spec.data(), axis, s, mode, out.data(), scratch.data());
  return out;
}

Field SpectralOps::frac_laplacian(Fft& fft, const Field& in, FracKind kind) const {
  check_field(in, "fractional_laplacian");
  std::vector<cplx> spec(npts_), scratch(npts_);
  Field out(npts_);
  to_spectrum(fft, in.data(), spec.data());
  frac_from_spectrum(fft, spec.data(), kind, out.data(), scratch.data());
  return out;
}

Field SpectralOps::smooth(Fft& fft, const Field& in) const {
  check_field(in, "smooth");
  std::vector<cplx> spec(npts_), scratch(npts_);
  Field out(npts_);
  to_spectrum(fft, in.data(), spec.data());
  smooth_from_spectrum(fft, spec.data(), out.data(), scratch.data());
  return out;
}

std::pair<std::vector<Field>, std::vector<Field>> SpectralOps::split_p_s(
    Fft& fft, const std::vector<Field>& v) const {
  const int d = g_.d;
  if (static_cast<int>(v.size()) != d)
    throw ShapeError("split_p_s: expected one field per dimension");
  for (const auto& c : v) check_field(c, "split_p_s");
  std::vector<std::vector<cplx>> spec(d, std::vector<cplx>(npts_));
  std::vector<const cplx*> specp(d);
  for (int i = 0; i < d; ++i) {
    to_spectrum(fft, v[i].data(), spec[i].data());
    specp[i] = spec[i].data();
  }
  std::vector<Field> vp(d, Field(npts_)), vs(d, Field(npts_));
  std::vector<double*> vpp(d);
  for (int i = 0; i < d; ++i) vpp[i] = vp[i].data();
  std::vector<cplx> scratch(2 * npts_);
  split_p_from_spectra(fft, specp.data(), vpp.data(), scratch.data());
  for (int i = 0; i < d; ++i)
    for (std::size_t z = 0; z < npts_; ++z) vs[i][z] = v[i][z] - vp[i][z];
  return {std::move(vp), std::move(vs)};
}

}  // namespace vispat
