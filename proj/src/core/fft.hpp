#pragma once

#include <complex>
#include <cstddef>

#include "core/grid.hpp"

namespace vispat {

using cplx = std::complex<double>;

// Complex-to-complex DFT over the spatial grid (rank d, row-major).
//
// Convention: forward() is an unnormalized DFT, inverse() carries the 1/N
// factor. Real fields are transformed via the complex DFT; inverse_real()
// discards the imaginary residue explicitly.
//
// An Fft instance owns FFTW plans and aligned scratch buffers; it is cheap
// relative to a solver and NOT safe for concurrent use. Create one per
// thread/solver.
class Fft {
 public:
  explicit Fft(const Grid& g);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }

  void forward(const double* in, cplx* out);
  void forward_c(const cplx* in, cplx* out);
  void inverse_real(const cplx* in, double* out);
  void inverse_c(const cplx* in, cplx* out);

 private:
  std::size_t n_;
  void* buf_in_;   // fftw_complex*
  void* buf_out_;  // fftw_complex*
  void* plan_fwd_;
  void* plan_bwd_;
};

}  // namespace vispat
