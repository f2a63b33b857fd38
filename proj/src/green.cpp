#include "esi/green.hpp"

#include <cmath>

namespace esi {

namespace {

using cplx = std::complex<double>;

// g(r) = (i/4) H0(k r) and its first two radial derivatives, k > 0.
struct RadialKernel {
  cplx g;
  cplx dg;
  cplx d2g;
};

RadialKernel radial_kernel(double k, double r) {
  const double z = k * r;
  const cplx h0(std::cyl_bessel_j(0, z), std::cyl_neumann(0, z));
  const cplx h1(std::cyl_bessel_j(1, z), std::cyl_neumann(1, z));
  const cplx i4(0.0, 0.25);
  RadialKernel out;
  out.g = i4 * h0;
  out.dg = -i4 * k * h1;
  out.d2g = i4 * (k * k) * (h1 / z - h0);
  return out;
}

}  // namespace

GreenParts kupradze_green(double x, double y, double omega,
                          const GridSpec& grid) {
  require(omega != 0.0, ErrorCode::InvalidArgument, "omega must be nonzero");
  const double r = std::hypot(x, y);
  require(r >= grid.h_x / 4.0, ErrorCode::SingularPoint,
          "evaluation point too close to the kernel singularity");
  if (omega < 0.0) {
    GreenParts g = kupradze_green(x, y, -omega, grid);
    g.p = g.p.conjugate();
    g.s = g.s.conjugate();
    g.full = g.full.conjugate();
    g.gamma = g.gamma.conjugate();
    return g;
  }

  const double cp = grid.c_p();
  const double cs = grid.c_s();
  const double w2 = omega * omega;
  const double nx = x / r;
  const double ny = y / r;
  Eigen::Matrix2d radial;
  radial << nx * nx, nx * ny, nx * ny, ny * ny;
  const Eigen::Matrix2d ortho = Eigen::Matrix2d::Identity() - radial;

  const RadialKernel gp = radial_kernel(omega / cp, r);
  const RadialKernel gs = radial_kernel(omega / cs, r);
  const double ks = omega / cs;

  GreenParts out;
  out.p = -(radial.cast<cplx>() * gp.d2g + ortho.cast<cplx>() * (gp.dg / r)) /
          w2;
  out.s = (Eigen::Matrix2cd::Identity() * (ks * ks * gs.g) +
           radial.cast<cplx>() * gs.d2g + ortho.cast<cplx>() * (gs.dg / r)) /
          w2;
  out.full = out.p + out.s;
  out.gamma = cp * out.p + cs * out.s;
  return out;
}

// Midpoint rule on (0, pi/h_t), flat inside the band with a cosine roll-off
// over the top eighth to suppress truncation ringing at the cutoff.
FrequencyGrid make_frequency_grid(const GridSpec& grid) {
  FrequencyGrid fg;
  const double omega_max = M_PI / grid.h_t;
  const double d_omega = 2.0 * M_PI / (4.0 * grid.t_max);
  const double edge = 0.875 * omega_max;
  for (int j = 0;; ++j) {
    const double w = (j + 0.5) * d_omega;
    if (w >= omega_max) break;
    const double taper =
        w <= edge ? 1.0
                  : 0.5 * (1.0 + std::cos(M_PI * (w - edge) /
                                          (omega_max - edge)));
    fg.omega.push_back(w);
    fg.weight.push_back(taper * d_omega / M_PI);
  }
  return fg;
}

std::vector<Eigen::Matrix2d> time_kernel(double dx, double dy,
                                         const std::vector<double>& times,
                                         const GridSpec& grid) {
  const FrequencyGrid fg = make_frequency_grid(grid);
  std::vector<Eigen::Matrix2cd> amps(fg.omega.size());
  for (std::size_t j = 0; j < fg.omega.size(); ++j) {
    const GreenParts g = kupradze_green(dx, dy, fg.omega[j], grid);
    amps[j] = (cplx(0.0, -fg.omega[j]) * fg.weight[j]) * g.full;
  }
  std::vector<Eigen::Matrix2d> out(times.size(), Eigen::Matrix2d::Zero());
  for (std::size_t n = 0; n < times.size(); ++n) {
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    for (std::size_t j = 0; j < fg.omega.size(); ++j) {
      const double phase = -fg.omega[j] * times[n];
      acc += amps[j] * cplx(std::cos(phase), std::sin(phase));
    }
    out[n] = acc.real();
  }
  return out;
}

}  // namespace esi
