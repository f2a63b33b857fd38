#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "esi/green.hpp"
#include "esi/grid.hpp"

using namespace esi;
using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

namespace {

Mat2c green_at(double x, double y, double omega, const GridSpec& g) {
  return kupradze_green(x, y, omega, g).full;
}

// Lame residual mu Lap u + (lambda + mu) grad(div u) + omega^2 u of one
// matrix column, second derivatives by central differences.
Eigen::Vector2cd lame_residual(double x, double y, double omega,
                               const GridSpec& g, int col, double d) {
  auto u = [&](double px, double py) {
    return Eigen::Vector2cd(green_at(px, py, omega, g).col(col));
  };
  const Eigen::Vector2cd c = u(x, y);
  const Eigen::Vector2cd xp = u(x + d, y), xm = u(x - d, y);
  const Eigen::Vector2cd yp = u(x, y + d), ym = u(x, y - d);
  const Eigen::Vector2cd pp = u(x + d, y + d), pm = u(x + d, y - d);
  const Eigen::Vector2cd mp = u(x - d, y + d), mm = u(x - d, y - d);

  const Eigen::Vector2cd dxx = (xp - 2.0 * c + xm) / (d * d);
  const Eigen::Vector2cd dyy = (yp - 2.0 * c + ym) / (d * d);
  const Eigen::Vector2cd dxy = (pp - pm - mp + mm) / (4.0 * d * d);

  const Eigen::Vector2cd lap = dxx + dyy;
  Eigen::Vector2cd grad_div;
  grad_div[0] = dxx[0] + dxy[1];
  grad_div[1] = dxy[0] + dyy[1];

  const double mu = g.mu, lam = g.lambda;
  return mu * lap + (lam + mu) * grad_div + omega * omega * c;
}

}  // namespace

TEST_CASE("kernel columns satisfy the time-harmonic equation") {
  const GridSpec g;
  const double d = 3e-4;
  for (double omega : {2.0, 5.0, 11.0}) {
    for (auto [x, y] : {std::pair{0.3, 0.2}, std::pair{-0.45, 0.1},
                        std::pair{0.05, -0.6}}) {
      const double scale =
          omega * omega * green_at(x, y, omega, g).cwiseAbs().maxCoeff();
      for (int col = 0; col < 2; ++col) {
        const Eigen::Vector2cd res = lame_residual(x, y, omega, g, col, d);
        CHECK(res.cwiseAbs().maxCoeff() <= 1e-4 * scale);
      }
    }
  }
}

TEST_CASE("pressure part is curl free and shear part divergence free") {
  const GridSpec g;
  const double d = 1e-5;
  const double omega = 6.0;
  for (auto [x, y] : {std::pair{0.35, 0.15}, std::pair{-0.2, 0.5}}) {
    const GreenParts xp = kupradze_green(x + d, y, omega, g);
    const GreenParts xm = kupradze_green(x - d, y, omega, g);
    const GreenParts yp = kupradze_green(x, y + d, omega, g);
    const GreenParts ym = kupradze_green(x, y - d, omega, g);
    const double scale =
        (omega / g.c_s()) *
        kupradze_green(x, y, omega, g).full.cwiseAbs().maxCoeff();
    for (int col = 0; col < 2; ++col) {
      const cplx curl_p = (xp.p(1, col) - xm.p(1, col)) / (2.0 * d) -
                          (yp.p(0, col) - ym.p(0, col)) / (2.0 * d);
      const cplx div_s = (xp.s(0, col) - xm.s(0, col)) / (2.0 * d) +
                         (yp.s(1, col) - ym.s(1, col)) / (2.0 * d);
      CHECK(std::abs(curl_p) <= 1e-5 * scale);
      CHECK(std::abs(div_s) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("kernel matrix symmetries") {
  const GridSpec g;
  const GreenParts a = kupradze_green(0.4, -0.3, 7.0, g);
  CHECK(std::abs(a.full(0, 1) - a.full(1, 0)) <= 1e-14);
  const GreenParts b = kupradze_green(-0.4, 0.3, 7.0, g);
  CHECK((a.full - b.full).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((a.full - (a.p + a.s)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.gamma - (g.c_p() * a.p + g.c_s() * a.s)).cwiseAbs().maxCoeff() ==
        0.0);
  const GreenParts c = kupradze_green(0.4, -0.3, -7.0, g);
  CHECK((c.full - a.full.conjugate()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel rejects the singular point and zero frequency") {
  const GridSpec g;
  CHECK_THROWS_AS((void)kupradze_green(0.0, 0.0, 3.0, g), Error);
  CHECK_THROWS_AS((void)kupradze_green(g.h_x / 8.0, 0.0, 3.0, g), Error);
  CHECK_THROWS_AS((void)kupradze_green(0.5, 0.5, 0.0, g), Error);
}

TEST_CASE("frequency grid covers the band with half-integer nodes") {
  const GridSpec g;
  const FrequencyGrid fg = make_frequency_grid(g);
  REQUIRE(!fg.omega.empty());
  REQUIRE(fg.omega.size() == fg.weight.size());
  const double d_omega = 2.0 * M_PI / (4.0 * g.t_max);
  const double omega_max = M_PI / g.h_t;
  for (std::size_t j = 0; j < fg.omega.size(); ++j) {
    CHECK(fg.omega[j] ==
          doctest::Approx((j + 0.5) * d_omega).epsilon(1e-12));
    CHECK(fg.omega[j] < omega_max);
    CHECK(fg.weight[j] > 0.0);
    CHECK(fg.weight[j] <= d_omega / M_PI + 1e-15);
  }
  // Flat part of the window below the roll-off edge.
  CHECK(fg.weight[0] == doctest::Approx(d_omega / M_PI).epsilon(1e-12));
  CHECK(fg.weight.back() < 0.5 * d_omega / M_PI);
}

TEST_CASE("time kernel is symmetric and even in space") {
  const GridSpec g;
  const std::vector<double> times = {0.5, 1.0, 1.5};
  const auto k1 = time_kernel(0.6, -0.2, times, g);
  const auto k2 = time_kernel(-0.6, 0.2, times, g);
  REQUIRE(k1.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(std::abs(k1[n](0, 1) - k1[n](1, 0)) <= 1e-12);
    CHECK((k1[n] - k2[n]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(k1[n].allFinite());
  }
}

TEST_CASE("time kernel decays before the first arrival") {
  const GridSpec g;
  // A detector 1.8 away sees nothing before t = 1.8 / c_P ~ 1.04.
  const std::vector<double> times = {0.25, 0.5, 2.0};
  const auto k = time_kernel(1.8, 0.0, times, g);
  const double pre = std::max(k[0].cwiseAbs().maxCoeff(),
                              k[1].cwiseAbs().maxCoeff());
  const double post = k[2].cwiseAbs().maxCoeff();
  CHECK(pre < 0.1 * post);
}
