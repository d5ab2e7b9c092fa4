#include "recon/tv.hpp"

#include <algorithm>
#include <cmath>

namespace vispat {

namespace {

struct Dims {
  int d;
  std::array<int, 3> n;
  std::array<std::size_t, 3> stride;  // row-major, last axis fastest
};

Dims dims_of(const Grid& g) {
  Dims dm;
  dm.d = g.d;
  dm.n = g.n;
  dm.stride[2] = 1;
  dm.stride[1] = static_cast<std::size_t>(g.n[2]);
  dm.stride[0] = static_cast<std::size_t>(g.n[1]) * g.n[2];
  return dm;
}

// forward difference along axis a, zero at the last index (replicate boundary)
inline double fwd(const double* p, const Dims& dm, const std::array<int, 3>& z,
                  std::size_t idx, int a) {
  if (z[a] == dm.n[a] - 1) return 0.0;
  return p[idx + dm.stride[a]] - p[idx];
}

template <typename Fn>
void for_each_index(const Dims& dm, Fn&& fn) {
  std::array<int, 3> z{0, 0, 0};
  std::size_t idx = 0;
  for (z[0] = 0; z[0] < dm.n[0]; ++z[0])
    for (z[1] = 0; z[1] < dm.n[1]; ++z[1])
      for (z[2] = 0; z[2] < dm.n[2]; ++z[2], ++idx) fn(z, idx);
}

}  // namespace

double tv_value(const Grid& g, const Field& p) {
  if (p.size() != g.npoints()) throw ShapeError("tv_value: field size mismatch");
  const Dims dm = dims_of(g);
  double tv = 0.0;
  for_each_index(dm, [&](const std::array<int, 3>& z, std::size_t idx) {
    double s = 0.0;
    for (int a = 0; a < dm.d; ++a) {
      const double df = fwd(p.data(), dm, z, idx, a);
      s += df * df;
    }
    tv += std::sqrt(s);
  });
  return tv;
}

Field tv_prox(const Grid& g, const Field& y, double weight, int iters,
              double tol) {
  const std::size_t n = g.npoints();
  if (y.size() != n) throw ShapeError("tv_prox: field size mismatch");
  if (weight < 0) throw ConfigError("tv_prox: negative weight");
  Field out(n);
  if (weight == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(y[i], 0.0);
    return out;
  }
  const Dims dm = dims_of(g);
  const int d = dm.d;
  // dual field, one component per axis
  std::vector<Field> dual(d, Field(n, 0.0));
  std::vector<Field> dual_new(d, Field(n, 0.0));
  const double step = 1.0 / (4.0 * d * weight);
  for (int it = 0; it < iters; ++it) {
    // primal estimate: out = max(y - weight * div(dual), 0), where div is
    // minus the adjoint of the forward-difference gradient
    for_each_index(dm, [&](const std::array<int, 3>& z, std::size_t idx) {
      double div = 0.0;
      for (int a = 0; a < d; ++a) {
        if (z[a] < dm.n[a] - 1) div -= dual[a][idx];
        if (z[a] > 0) div += dual[a][idx - dm.stride[a]];
      }
      out[idx] = std::max(y[idx] - weight * div, 0.0);
    });
    // dual ascent step + pointwise l2-ball projection (isotropic TV)
    double change = 0.0, nrm = 0.0;
    for_each_index(dm, [&](const std::array<int, 3>& z, std::size_t idx) {
      double mag = 0.0;
      double grad[3];
      for (int a = 0; a < d; ++a) {
        grad[a] = dual[a][idx] + step * fwd(out.data(), dm, z, idx, a);
        mag += grad[a] * grad[a];
      }
      const double scale = 1.0 / std::max(1.0, std::sqrt(mag));
      for (int a = 0; a < d; ++a) {
        const double v = grad[a] * scale;
        const double dv = v - dual[a][idx];
        change += dv * dv;
        nrm += v * v;
        dual_new[a][idx] = v;
      }
    });
    dual.swap(dual_new);
    if (nrm > 0 && std::sqrt(change / nrm) < tol) break;
  }
  // final primal from the converged dual
  for_each_index(dm, [&](const std::array<int, 3>& z, std::size_t idx) {
    double div = 0.0;
    for (int a = 0; a < d; ++a) {
      if (z[a] < dm.n[a] - 1) div -= dual[a][idx];
      if (z[a] > 0) div += dual[a][idx - dm.stride[a]];
    }
    out[idx] = std::max(y[idx] - weight * div, 0.0);
  });
  return out;
}

}  // namespace vispat
