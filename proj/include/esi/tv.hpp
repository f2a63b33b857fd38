#pragma once

#include "esi/common.hpp"
#include "esi/field.hpp"

namespace esi {

struct TVParams {
  double gamma = 0.0;
  int max_iters = 500;
  double tol = 1e-6;
};

// Isotropic discrete total variation sum_ij hypot(forward dx, forward dy)
// with one-sided differences at the last row/column.
double tv_value(const ScalarField& x);

// 0.5 * ||x - b||^2 + gamma * TV(x).
double tv_objective(const ScalarField& x, const ScalarField& b, double gamma);

// Accelerated dual projected gradient on the TV dual; gamma = 0 returns the
// input unchanged. Stops when the relative iterate change drops below tol.
ScalarField tv_denoise(const ScalarField& b, const TVParams& params);

}  // namespace esi
