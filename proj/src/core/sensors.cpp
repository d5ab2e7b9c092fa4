#include "core/sensors.hpp"

#include <cmath>

namespace vispat {

SensorArray::SensorArray(const Grid& g,
                         const std::vector<std::array<double, 3>>& coords)
    : coords_(coords) {
  const int d = g.d;
  ncorners_ = 1 << d;
  idx_.resize(coords.size());
  w_.resize(coords.size());
  const std::size_t stride1 = static_cast<std::size_t>(g.n[1]) * g.n[2];
  const std::size_t stride2 = g.n[2];
  for (std::size_t s = 0; s < coords.size(); ++s) {
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      // fractional grid index in the centered coordinate convention
      double u = coords[s][a] / g.dx[a] + 0.5 * (g.n[a] - 1);
      // snap roundoff-level overhang onto the boundary nodes so detectors
      // placed exactly on a grid face stay valid
      const double umax = static_cast<double>(g.n[a] - 1);
      if (u < 0.0 && u > -1e-9) u = 0.0;
      if (u > umax && u < umax + 1e-9) u = umax;
      const double fl = std::floor(u);
      base[a] = static_cast<int>(fl);
      frac[a] = u - fl;
      if (base[a] == g.n[a] - 1 && frac[a] == 0.0) {
        base[a] -= 1;
        frac[a] = 1.0;
      }
      if (base[a] < 0 || base[a] + 1 >= g.n[a])
        throw ConfigError("sensors: detector outside grid along axis " +
                          std::to_string(a));
    }
    idx_[s].resize(ncorners_);
    w_[s].resize(ncorners_);
    for (int c = 0; c < ncorners_; ++c) {
      double wgt = 1.0;
      std::array<int, 3> z = base;
      for (int a = 0; a < d; ++a) {
        if (c & (1 << a)) {
          z[a] += 1;
          wgt *= frac[a];
        } else {
          wgt *= 1.0 - frac[a];
        }
      }
      idx_[s][c] = static_cast<std::size_t>(z[0]) * stride1 + z[1] * stride2 + z[2];
      w_[s][c] = wgt;
    }
  }
}

void SensorArray::sample(const double* field, double* out) const {
  for (std::size_t s = 0; s < idx_.size(); ++s) {
    double acc = 0.0;
    for (int c = 0; c < ncorners_; ++c) acc += w_[s][c] * field[idx_[s][c]];
    out[s] = acc;
  }
}

void SensorArray::scatter_add(const double* in, double* field, double scale) const {
  for (std::size_t s = 0; s < idx_.size(); ++s) {
    const double v = scale * in[s];
    for (int c = 0; c < ncorners_; ++c) field[idx_[s][c]] += w_[s][c] * v;
  }
}

}  // namespace vispat
