#include "esi/time_reversal.hpp"

#include <cmath>

#include "esi/helmholtz.hpp"

namespace esi {

VectorField2 back_propagate(const MeasurementSet& m, const GridSpec& grid,
                            Exec ex) {
  validate_detectors(m.detectors, grid);
  const int m_count = m.detectors.count();
  const int n_count = m.detectors.sample_count();
  require(m.traces.size() ==
              static_cast<std::size_t>(2) * n_count * m_count,
          ErrorCode::DimMismatch,
          "trace buffer does not match the detector geometry");

  std::vector<BilinearStencil> stencils;
  std::vector<int> sample_step;
  for (int d = 0; d < m_count; ++d)
    stencils.push_back(
        bilinear_stencil(m.detectors.pos_x[d], m.detectors.pos_y[d], grid));
  for (double t : m.detectors.times) {
    const int k = static_cast<int>(std::lround(t / grid.h_t));
    require(std::abs(k * grid.h_t - t) <= 1e-9, ErrorCode::InvalidArgument,
            "sample time does not align with a solver step");
    sample_step.push_back(k);
  }

  const double weight = (grid.t_max / n_count) * (2.0 * M_PI / m_count) /
                        (grid.h_x * grid.h_x);

  ElasticState state;
  state.u = VectorField2(grid.n_x, grid.n_x);
  state.v = VectorField2(grid.n_x, grid.n_x);
  ElasticStepper stepper(grid, ex, true);
  for (int j = n_count - 1; j >= 0; --j) {
    for (int d = 0; d < m_count; ++d) {
      const BilinearStencil& st = stencils[static_cast<std::size_t>(d)];
      const double gx = weight * m.at(0, j, d);
      const double gy = weight * m.at(1, j, d);
      for (int c = 0; c < 4; ++c) {
        state.u.x.at(st.iy[c], st.ix[c]) += st.w[c] * gx;
        state.u.y.at(st.iy[c], st.ix[c]) += st.w[c] * gy;
      }
    }
    const int steps = sample_step[static_cast<std::size_t>(j)] -
                      (j > 0 ? sample_step[static_cast<std::size_t>(j - 1)]
                             : 0);
    for (int k = 0; k < steps; ++k) stepper.step(state);
  }
  return state.u;
}

TRImage weighted_time_reversal(const MeasurementSet& m, const GridSpec& grid,
                               Exec ex) {
  TRImage img;
  img.raw = back_propagate(m, grid, ex);
  const HelmholtzParts parts = decompose(img.raw, grid, ex);
  img.weighted = weighted_recombine(parts, grid.c_p(), grid.c_s());
  return img;
}

}  // namespace esi
