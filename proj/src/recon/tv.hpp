#pragma once

#include "core/grid.hpp"

namespace vispat {

// Isotropic total variation with forward differences and replicate boundary
// (the difference across the last index of each axis is zero).
double tv_value(const Grid& g, const Field& p);

// prox_{weight TV + positivity}(y): approximately solves
//   argmin_{p >= 0} weight * TV(p) + 1/2 ||p - y||^2
// by gradient projection on Chambolle's dual with the primal positivity
// projection folded into each dual step (Beck & Teboulle's GP scheme).
// Dual step size 1/(4 d weight) = 1/(weight ||div||^2).
// weight == 0 degenerates to the elementwise positive part of y.
Field tv_prox(const Grid& g, const Field& y, double weight, int iters = 60,
              double tol = 1e-8);

}  // namespace vispat
