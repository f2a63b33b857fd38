#pragma once

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/grid.hpp"
#include "esi/par.hpp"

namespace esi {

// Splitting w - mean(w) = grad_phi + curl_psi with curl-free grad_phi and
// divergence-free curl_psi; the constant mode has no potential and is
// reported separately.
struct HelmholtzParts {
  VectorField2 grad_phi;
  VectorField2 curl_psi;
  ScalarField phi;
  ScalarField psi;
  double mean_x = 0.0;
  double mean_y = 0.0;
};

HelmholtzParts decompose(const VectorField2& w, const GridSpec& grid,
                         Exec ex = Exec::parallel);

// c_s * curl_psi + c_p * grad_phi.
VectorField2 weighted_recombine(const HelmholtzParts& parts, double c_p,
                                double c_s);

}  // namespace esi
