#pragma once

#include <array>
#include <vector>

#include "core/grid.hpp"

namespace vispat {

// Layout of the stacked field vector X = [v_bar; sigma_bar] of section 5.
//
// Velocity: _m v_i for all m,i in {0..d-1} -> d^2 fields.
// Stress: per branch (p then s), symmetric components (i<=j) with PML
// direction slots: diagonal components (i,i) carry ALL d slots m (the
// lambda/chi divergence terms contribute along every split direction);
// off-diagonal components (i<j) carry only m in {i,j} (all other slots are
// identically zero and are not stored). That gives 6 stress fields per
// branch in 2D and 15 in 3D, so X has 16N (2D) / 39N (3D) entries, matching
// the paper's counts.
//
// Field order within X: velocity fields (m-major, i minor), then p-branch
// stress, then s-branch stress. Stress components are ordered diagonals
// (0,0)..(d-1,d-1) followed by off-diagonals (0,1)[,(0,2),(1,2)], each
// component's slots in ascending m.
struct StressComp {
  int i, j;
  int nslots;
  std::array<int, 3> slots;  // PML direction of each slot
};

class StateLayout {
 public:
  explicit StateLayout(int d);

  int d() const { return d_; }
  int ncomps() const { return static_cast<int>(comps_.size()); }
  const StressComp& comp(int c) const { return comps_[c]; }
  int comp_of(int i, int j) const;  // order-insensitive
  // position of PML direction m within comp c's slot list, or -1
  int slot_pos(int c, int m) const;

  int nvel_fields() const { return d_ * d_; }
  int nstress_fields_per_branch() const { return stress_fields_; }
  int nfields() const { return d_ * d_ + 2 * stress_fields_; }

  int vel_field(int m, int i) const { return m * d_ + i; }
  // branch b in {0=p, 1=s}, component c, slot position sp
  int stress_field(int b, int c, int sp) const {
    return d_ * d_ + b * stress_fields_ + comp_offset_[c] + sp;
  }

 private:
  int d_;
  int stress_fields_;
  std::vector<StressComp> comps_;
  std::vector<int> comp_offset_;
};

// Stacked state vector plus accessors. npts is the grid size N.
struct WaveState {
  std::vector<double> x;
  std::size_t npts = 0;

  void init(const StateLayout& layout, std::size_t n) {
    npts = n;
    x.assign(static_cast<std::size_t>(layout.nfields()) * n, 0.0);
  }
  double* field(int f) { return x.data() + static_cast<std::size_t>(f) * npts; }
  const double* field(int f) const {
    return x.data() + static_cast<std::size_t>(f) * npts;
  }
};

}  // namespace vispat
