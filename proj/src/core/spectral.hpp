#pragma once

#include <array>
#include <vector>

#include "core/fft.hpp"
#include "core/grid.hpp"

namespace vispat {

enum class Shift { Plus, Minus };
enum class WaveMode { P, S };
enum class FracKind { Dis, Abs };

// Precomputed wavenumber-space multiplier tables: k-space-corrected staggered
// derivatives, p/s splitting projectors, fractional Laplacians and the
// smoothing window. Immutable after construction; callers supply an Fft
// workspace so one operator set can serve many threads.
//
// DC and Nyquist handling (the paper leaves both open):
//  * derivative multipliers vanish where k_axis = 0;
//  * fractional multipliers k^(y-1), k^(y-2) are 0 at DC;
//  * the splitting projector is the identity (Q^p = I, all energy assigned
//    to the compressional part) at DC and at every bin containing a Nyquist
//    component. The latter keeps Q exactly idempotent/self-adjoint on real
//    fields: the half-cell phase e^{ik dx/2} is purely imaginary at Nyquist,
//    which would otherwise leak imaginary residue into the projector algebra.
class SpectralOps {
 public:
  SpectralOps(const Grid& g, double y);

  const Grid& grid() const { return g_; }

  // --- spectrum-level API (hot path; caller owns buffers of size N) ---
  void to_spectrum(Fft& fft, const double* in, cplx* spec) const;
  void deriv_from_spectrum(Fft& fft, const cplx* spec, int axis, Shift s,
                           WaveMode mode, double* out, cplx* scratch) const;
  void frac_from_spectrum(Fft& fft, const cplx* spec, FracKind kind,
                          double* out, cplx* scratch) const;
  void smooth_from_spectrum(Fft& fft, const cplx* spec, double* out,
                            cplx* scratch) const;
  // vspec: d velocity-component spectra; writes the compressional parts.
  void split_p_from_spectra(Fft& fft, const cplx* const* vspec,
                            double* const* vp_out, cplx* scratch) const;

  // --- convenience API (allocates; used by tests and cold paths) ---
  Field derivative(Fft& fft, const Field& in, int axis, Shift s,
                   WaveMode mode) const;
  Field frac_laplacian(Fft& fft, const Field& in, FracKind kind) const;
  Field smooth(Fft& fft, const Field& in) const;
  // Returns (v^p, v^s) with v^s = v - v^p.
  std::pair<std::vector<Field>, std::vector<Field>> split_p_s(
      Fft& fft, const std::vector<Field>& v) const;

  double y() const { return y_; }

 private:
  void check_field(const Field& f, const char* what) const;

  Grid g_;
  double y_;
  std::size_t npts_;
  // per-axis: i*k*exp(sign*i*k*dx/2), indexed [axis][sign(0:+,1:-)][bin]
  std::array<std::array<std::vector<cplx>, 2>, 3> deriv_mult_;
  // per-axis half-cell shift phase e^{+i k dx/2} (split projector factor)
  std::array<std::vector<cplx>, 3> shift_phase_;
  std::vector<double> sinc_p_, sinc_s_;     // full grid, k-space correction
  std::vector<double> kfrac_dis_, kfrac_abs_;  // k^(y-1), k^(y-2), 0 at DC
  std::vector<double> smooth_win_;             // separable Blackman window
  std::vector<double> inv_k_;                  // 1/|k|, 0 at DC
  std::vector<unsigned char> proj_identity_;   // Q = I at these bins
};

}  // namespace vispat
