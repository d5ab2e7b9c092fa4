#include "core/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace vispat {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(const Grid& g) : n_(g.npoints()) {
  fftw_complex* bin = fftw_alloc_complex(n_);
  fftw_complex* bout = fftw_alloc_complex(n_);
  buf_in_ = bin;
  buf_out_ = bout;
  int dims[3] = {g.n[0], g.n[1], g.n[2]};
  int rank = g.d == 2 ? 2 : 3;
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps plans deterministic (no timing-dependent choices),
  // which the bit-determinism contract relies on.
  plan_fwd_ = fftw_plan_dft(rank, dims, bin, bout, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft(rank, dims, bin, bout, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(static_cast<fftw_complex*>(buf_in_));
  fftw_free(static_cast<fftw_complex*>(buf_out_));
}

void Fft::forward(const double* in, cplx* out) {
  fftw_complex* bin = static_cast<fftw_complex*>(buf_in_);
  for (std::size_t i = 0; i < n_; ++i) {
    bin[i][0] = in[i];
    bin[i][1] = 0.0;
  }
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, buf_out_, n_ * sizeof(cplx));
}

void Fft::forward_c(const cplx* in, cplx* out) {
  std::memcpy(buf_in_, in, n_ * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, buf_out_, n_ * sizeof(cplx));
}

void Fft::inverse_real(const cplx* in, double* out) {
  std::memcpy(buf_in_, in, n_ * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  fftw_complex* bout = static_cast<fftw_complex*>(buf_out_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = bout[i][0] * scale;
}

void Fft::inverse_c(const cplx* in, cplx* out) {
  std::memcpy(buf_in_, in, n_ * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double scale = 1.0 / static_cast<double>(n_);
  fftw_complex* bout = static_cast<fftw_complex*>(buf_out_);
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = cplx(bout[i][0] * scale, bout[i][1] * scale);
}

}  // namespace vispat
