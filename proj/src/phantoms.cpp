#include "esi/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esi/rng.hpp"

namespace esi {

namespace {

bool inside_ellipse(const EllipseSpec& e, double x, double y) {
  const double dx = x - e.center_x;
  const double dy = y - e.center_y;
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  const double a = u / e.semi_x;
  const double b = v / e.semi_y;
  return a * a + b * b <= 1.0;
}

// Clamp negatives, then scale the maximum to one. Returns false when the
// summed image carries no positive mass.
bool normalize_unit_range(ScalarField& f) {
  double max_v = 0.0;
  for (double& v : f.data) {
    if (v < 0.0) v = 0.0;
    max_v = std::max(max_v, v);
  }
  if (max_v == 0.0) return false;
  for (double& v : f.data) v /= max_v;
  return true;
}

}  // namespace

ScalarField rasterize_ellipses(const std::vector<EllipseSpec>& ellipses,
                               const GridSpec& grid) {
  ScalarField f(grid.n_x, grid.n_x);
  for (int iy = 0; iy < grid.n_x; ++iy) {
    const double y = grid.x(iy);
    for (int ix = 0; ix < grid.n_x; ++ix) {
      const double x = grid.x(ix);
      double sum = 0.0;
      for (const EllipseSpec& e : ellipses)
        if (inside_ellipse(e, x, y)) sum += e.intensity;
      f.at(iy, ix) = sum;
    }
  }
  return f;
}

PhantomImage random_phantom(std::uint64_t seed, const GridSpec& grid) {
  const double margin = 1.0 - 4.0 * grid.h_x;
  require(margin > 2.0 * grid.h_x, ErrorCode::InvalidArgument,
          "grid too coarse for an interior phantom");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int count = 1 + static_cast<int>(rng.next_double() * 10.0);
    std::vector<EllipseSpec> ellipses;
    for (int e = 0; e < count; ++e) {
      EllipseSpec spec;
      int draws = 0;
      for (;; ++draws) {
        require(draws < 1000, ErrorCode::DegenerateImage,
                "could not place an ellipse inside the margin");
        spec.center_x = rng.uniform(-0.375, 0.375);
        spec.center_y = rng.uniform(-0.375, 0.375);
        spec.semi_x = std::abs(rng.uniform(-0.525, 0.525));
        spec.semi_y = std::abs(rng.uniform(-0.525, 0.525));
        if (spec.semi_x < 2.0 * grid.h_x || spec.semi_y < 2.0 * grid.h_x)
          continue;
        spec.angle = rng.uniform(-M_PI, M_PI);
        spec.intensity = rng.uniform(-10.0, 10.0);
        const double reach = std::hypot(spec.center_x, spec.center_y) +
                             std::max(spec.semi_x, spec.semi_y);
        if (reach <= margin) break;
      }
      ellipses.push_back(spec);
    }
    ScalarField img = rasterize_ellipses(ellipses, grid);
    if (!normalize_unit_range(img)) continue;
    return {std::move(img), std::move(ellipses), seed};
  }
  fail(ErrorCode::DegenerateImage,
       "no positive-mass phantom after 100 attempts");
}

PhantomImage shepp_logan(const GridSpec& grid, double scale) {
  struct Row {
    double a, sx, sy, cx, cy, deg;
  };
  static const Row table[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.98, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.02, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.02, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.01, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.01, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.01, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.01, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.01, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.01, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  require(scale > 0.0 && scale * 0.92 <= 1.0 - 4.0 * grid.h_x,
          ErrorCode::InvalidArgument,
          "scale places the phantom outside the interior margin");
  PhantomImage out;
  out.seed = 0;
  for (const Row& r : table) {
    EllipseSpec e;
    e.center_x = scale * r.cx;
    e.center_y = scale * r.cy;
    e.semi_x = scale * r.sx;
    e.semi_y = scale * r.sy;
    e.angle = r.deg * M_PI / 180.0;
    e.intensity = r.a;
    out.ellipses.push_back(e);
  }
  out.image = rasterize_ellipses(out.ellipses, grid);
  normalize_unit_range(out.image);
  return out;
}

ScalarField radial_bump(const GridSpec& grid, double center_x,
                        double center_y, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  ScalarField f(grid.n_x, grid.n_x);
  for (int iy = 0; iy < grid.n_x; ++iy)
    for (int ix = 0; ix < grid.n_x; ++ix) {
      const double dx = grid.x(ix) - center_x;
      const double dy = grid.x(iy) - center_y;
      const double q = (dx * dx + dy * dy) / (radius * radius);
      f.at(iy, ix) = q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    }
  return f;
}

VectorField2 phantom_source(std::uint64_t seed, const GridSpec& grid,
                            bool both_components) {
  Rng rng(seed);
  const std::uint64_t seed_x = rng.next_u64();
  const std::uint64_t seed_y = rng.next_u64();
  VectorField2 f(grid.n_x, grid.n_x);
  f.x = random_phantom(seed_x, grid).image;
  if (both_components) f.y = random_phantom(seed_y, grid).image;
  return f;
}

MeasurementSet add_noise(const MeasurementSet& m, double snr_db,
                         std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return m;
  require(std::isfinite(snr_db), ErrorCode::InvalidArgument,
          "snr must be finite or +infinity");
  require(!m.traces.empty(), ErrorCode::EmptyMeasurements, "no traces");
  double power = 0.0;
  for (double v : m.traces) power += v * v;
  power /= static_cast<double>(m.traces.size());
  require(power > 0.0, ErrorCode::ZeroSignal,
          "cannot scale noise to an all-zero signal");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  MeasurementSet out = m;
  Rng rng(seed);
  for (double& v : out.traces) v += sigma * rng.next_gaussian();
  return out;
}

}  // namespace esi
