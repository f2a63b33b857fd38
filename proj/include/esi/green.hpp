#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "esi/common.hpp"
#include "esi/grid.hpp"

namespace esi {

// Frequency-domain fundamental solution of the time-harmonic operator,
// split into pressure and shear parts; gamma is the speed-weighted kernel
// c_P * p + c_S * s.
struct GreenParts {
  Eigen::Matrix2cd p;
  Eigen::Matrix2cd s;
  Eigen::Matrix2cd full;
  Eigen::Matrix2cd gamma;
};

GreenParts kupradze_green(double x, double y, double omega,
                          const GridSpec& grid);

// Positive half-axis quadrature grid for time synthesis. Nodes sit at
// half-integer multiples of d_omega so omega = 0 is never evaluated; the
// weight folds the Hann taper, d_omega, and the 1/pi of the real-part sum.
struct FrequencyGrid {
  std::vector<double> omega;
  std::vector<double> weight;
};

FrequencyGrid make_frequency_grid(const GridSpec& grid);

// Time-derivative kernel dG/dt(x, t_n) synthesized from the frequency grid.
std::vector<Eigen::Matrix2d> time_kernel(double dx, double dy,
                                         const std::vector<double>& times,
                                         const GridSpec& grid);

}  // namespace esi
