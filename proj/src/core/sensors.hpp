#pragma once

#include <array>
#include <vector>

#include "core/grid.hpp"

namespace vispat {

// Detector array with bilinear (2D) / trilinear (3D) interpolation weights,
// i.e. the sparse matrix MW in R^{Ns x N}. Weights per detector are a convex
// combination of its 2^d enclosing grid nodes.
class SensorArray {
 public:
  // coords: Ns physical positions (centered convention, see Grid::coord).
  SensorArray(const Grid& g, const std::vector<std::array<double, 3>>& coords);

  int count() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::array<double, 3>>& coords() const { return coords_; }

  // out[s] = sum_c w[s][c] * field[idx[s][c]]
  void sample(const double* field, double* out) const;
  // Transpose: field[idx[s][c]] += scale * w[s][c] * in[s]
  void scatter_add(const double* in, double* field, double scale = 1.0) const;

 private:
  std::vector<std::array<double, 3>> coords_;
  int ncorners_;
  std::vector<std::vector<std::size_t>> idx_;
  std::vector<std::vector<double>> w_;
};

// Sensor-sampled pressure, data[s * nt + n].
struct TimeSeries {
  int ns = 0;
  int nt = 0;
  double dt = 0;
  std::vector<double> data;

  double& at(int s, int n) { return data[static_cast<std::size_t>(s) * nt + n]; }
  double at(int s, int n) const { return data[static_cast<std::size_t>(s) * nt + n]; }
};

}  // namespace vispat
