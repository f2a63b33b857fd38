#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/grid.hpp"
#include "esi/par.hpp"

namespace esi {

struct ElasticState {
  VectorField2 u;
  VectorField2 v;
  double t = 0.0;
};

struct DetectorArray {
  std::vector<double> pos_x;
  std::vector<double> pos_y;
  std::vector<double> times;

  int count() const { return static_cast<int>(pos_x.size()); }
  int sample_count() const { return static_cast<int>(times.size()); }
};

// m detectors equally spaced on the unit circle; n sample instants
// k * t_max / n for k = 1..n, each aligned with a solver step.
DetectorArray uniform_detectors(int m, int n, const GridSpec& grid);
void validate_detectors(const DetectorArray& d, const GridSpec& grid);

struct MeasurementSet {
  DetectorArray detectors;
  // Flattened traces, index i * (N * M) + n * M + m for component i,
  // time sample n, detector m.
  std::vector<double> traces;

  double& at(int comp, int n, int m) {
    const int nm = detectors.sample_count() * detectors.count();
    return traces[static_cast<std::size_t>(comp) * nm +
                  static_cast<std::size_t>(n) * detectors.count() + m];
  }
  double at(int comp, int n, int m) const {
    const int nm = detectors.sample_count() * detectors.count();
    return traces[static_cast<std::size_t>(comp) * nm +
                  static_cast<std::size_t>(n) * detectors.count() + m];
  }
  Eigen::VectorXd vector() const;
};

// Four-point periodic bilinear interpolation stencil at (x, y).
struct BilinearStencil {
  int ix[4];
  int iy[4];
  double w[4];
};
BilinearStencil bilinear_stencil(double x, double y, const GridSpec& grid);

// Spectral L u = mu Laplace(u) + (lambda + mu) grad(div u) on the
// periodic box.
VectorField2 apply_lame_operator(const VectorField2& u, const GridSpec& grid,
                                 Exec ex = Exec::parallel);

// One-step propagator: half-step matched-layer damping, exact per-mode
// spectral rotation over h_t, half-step damping. With transposed = true the
// step applies the matrix transpose of the forward step, so a reversed
// sweep built on it is the exact discrete adjoint of simulate.
class ElasticStepper {
 public:
  ElasticStepper(const GridSpec& grid, Exec ex, bool transposed = false);
  void step(ElasticState& s) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  Exec ex_;
  bool transposed_ = false;
  std::vector<double> damp_half_;
  std::vector<double> freq_;

  void damp(ElasticState& s) const;
};

MeasurementSet simulate(const VectorField2& source, const GridSpec& grid,
                        const DetectorArray& detectors,
                        Exec ex = Exec::parallel);

MeasurementSet subsample(const MeasurementSet& m, int keep_detectors,
                         int keep_times);

// Discrete wave energy: kinetic plus elastic part, conserved exactly by the
// spectral rotation when the absorbing layer is disabled.
double elastic_energy(const ElasticState& s, const GridSpec& grid,
                      Exec ex = Exec::parallel);

void save_measurements(const MeasurementSet& m, const std::string& csv_path);
MeasurementSet load_measurements(const std::string& csv_path);

}  // namespace esi
