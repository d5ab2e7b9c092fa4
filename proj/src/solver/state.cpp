#include "solver/state.hpp"

namespace vispat {

StateLayout::StateLayout(int d) : d_(d) {
  if (d != 2 && d != 3) throw ConfigError("state: d must be 2 or 3");
  for (int i = 0; i < d; ++i) {
    StressComp c;
    c.i = c.j = i;
    c.nslots = d;
    for (int m = 0; m < d; ++m) c.slots[m] = m;
    comps_.push_back(c);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      StressComp c;
      c.i = i;
      c.j = j;
      c.nslots = 2;
      c.slots = {i, j, 0};
      comps_.push_back(c);
    }
  }
  comp_offset_.resize(comps_.size());
  int off = 0;
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    comp_offset_[c] = off;
    off += comps_[c].nslots;
  }
  stress_fields_ = off;  // 6 (2D), 15 (3D)
}

int StateLayout::comp_of(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == j) return i;
  // off-diagonals follow the d diagonals: (0,1), (0,2), (1,2)
  return d_ + (d_ == 2 ? 0 : (i + j - 1));
}

int StateLayout::slot_pos(int c, int m) const {
  const StressComp& sc = comps_[c];
  for (int s = 0; s < sc.nslots; ++s)
    if (sc.slots[s] == m) return s;
  return -1;
}

}  // namespace vispat
