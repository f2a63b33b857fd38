#pragma once

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/grid.hpp"
#include "esi/par.hpp"
#include "esi/solver.hpp"

namespace esi {

struct TRImage {
  VectorField2 raw;
  VectorField2 weighted;
};

// Single reversed-time sweep: the trace measured at t_j is injected at the
// detector locations through the transpose of the sampling stencil and then
// propagated for a duration t_j with the transposed one-step map, making the
// sweep the exact discrete adjoint of simulate up to the quadrature weights.
// The injection weight (t_max / N) * (2 pi / M) / h_x^2 combines the time
// quadrature, the uniform circle measure, and the grid Dirac density.
VectorField2 back_propagate(const MeasurementSet& m, const GridSpec& grid,
                            Exec ex = Exec::parallel);

TRImage weighted_time_reversal(const MeasurementSet& m, const GridSpec& grid,
                               Exec ex = Exec::parallel);

}  // namespace esi
