#pragma once

#include <cstdint>
#include <vector>

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/grid.hpp"
#include "esi/solver.hpp"

namespace esi {

struct EllipseSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double semi_x = 0.0;
  double semi_y = 0.0;
  double angle = 0.0;
  double intensity = 0.0;
};

struct PhantomImage {
  ScalarField image;
  std::vector<EllipseSpec> ellipses;
  std::uint64_t seed = 0;
};

ScalarField rasterize_ellipses(const std::vector<EllipseSpec>& ellipses,
                               const GridSpec& grid);

// 1..10 random overlapping ellipses with signed intensities; negatives are
// clamped to zero before dividing by the maximum, so the result lies in
// [0, 1] and keeps its support inside the |x| <= 1 - 4 h_x margin.
PhantomImage random_phantom(std::uint64_t seed, const GridSpec& grid);

PhantomImage shepp_logan(const GridSpec& grid, double scale);

// Smooth compactly supported bump exp(1 - 1/(1 - (r/R)^2)) about a center.
ScalarField radial_bump(const GridSpec& grid, double center_x,
                        double center_y, double radius);

// Vector source built from phantoms: the x component from `seed`, the y
// component either zero or an independently derived phantom.
VectorField2 phantom_source(std::uint64_t seed, const GridSpec& grid,
                            bool both_components);

// White Gaussian noise scaled to the requested signal-to-noise ratio; an
// infinite snr_db passes the input through untouched.
MeasurementSet add_noise(const MeasurementSet& m, double snr_db,
                         std::uint64_t seed);

}  // namespace esi
