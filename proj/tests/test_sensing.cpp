#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "esi/field.hpp"
#include "esi/green.hpp"
#include "esi/grid.hpp"
#include "esi/rng.hpp"
#include "esi/sensing.hpp"

using namespace esi;

namespace {

GridSpec tiny_grid() { return make_grid(4.0, 32, 2.0, 16, 1.0, 1.0, 4); }

DetectorArray offset_detectors(int m, int n, const GridSpec& g) {
  DetectorArray d;
  for (int i = 0; i < m; ++i) {
    const double a = 2.0 * M_PI * (i + 0.25) / m;
    d.pos_x.push_back(std::cos(a));
    d.pos_y.push_back(std::sin(a));
  }
  const int stride = g.n_t / n;
  for (int k = 1; k <= n; ++k) d.times.push_back(k * stride * g.h_t);
  return d;
}

SensingMatrix synthetic_rows(const Eigen::MatrixXd& entries) {
  SensingMatrix m;
  m.entries = entries;
  m.grid = tiny_grid();
  return m;
}

}  // namespace

TEST_CASE("assembled entries match the kernel quadrature") {
  const GridSpec g = tiny_grid();
  const DetectorArray det = offset_detectors(2, 2, g);
  const SensingMatrix L = assemble_sensing(g, det);
  const int q_count = L.pixel_count();
  REQUIRE(L.entries.rows() == 2 * 2 * 2);
  REQUIRE(L.entries.cols() == 2 * q_count);

  const int crop_lo = g.crop_lo();
  const int c = g.crop_n();
  Rng rng(101);
  for (int probe = 0; probe < 12; ++probe) {
    const int i = static_cast<int>(rng.next_u64() % 2);
    const int j = static_cast<int>(rng.next_u64() % 2);
    const int n = static_cast<int>(rng.next_u64() % 2);
    const int m = static_cast<int>(rng.next_u64() % 2);
    const int q = static_cast<int>(rng.next_u64() % q_count);
    const double zx = g.x(crop_lo + q % c);
    const double zy = g.x(crop_lo + q / c);
    const auto kernel =
        time_kernel(det.pos_x[m] - zx, det.pos_y[m] - zy, det.times, g);
    const double expected = g.h_x * g.h_x * kernel[n](i, j);
    const double got =
        L.entries(i * 4 + n * 2 + m, j * q_count + q);
    CHECK(got == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("assembly rejects detectors on crop pixels") {
  const GridSpec g = tiny_grid();
  DetectorArray det;
  det.pos_x = {-1.0};
  det.pos_y = {0.0};
  det.times = {g.t_max};
  CHECK_THROWS_AS((void)assemble_sensing(g, det), Error);
}

TEST_CASE("pseudo-inverse closed form for scaled orthogonal rows") {
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(2, 4);
  const double s = 3.0;
  entries(0, 0) = s;
  entries(1, 1) = s;
  const SensingMatrix m = synthetic_rows(entries);
  const double eps = 0.01;
  const PseudoInverse inv = right_pseudo_inverse(m, eps);
  Eigen::VectorXd gvec(2);
  gvec << 1.0, -2.0;
  const Eigen::VectorXd f = inv.apply(gvec);
  CHECK(f[0] == doctest::Approx(s / (s * s + eps) * 1.0).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(s / (s * s + eps) * -2.0).epsilon(1e-12));
  CHECK(f[2] == 0.0);
  CHECK(f[3] == 0.0);
  const Eigen::VectorXd proj = inv.project(gvec);
  CHECK(proj[0] ==
        doctest::Approx(s * s / (s * s + eps) * 1.0).epsilon(1e-12));

  // Large ridge: the ridge limit direction Lambda^T g / eps.
  const PseudoInverse heavy = right_pseudo_inverse(m, 1e9);
  const Eigen::VectorXd fh = heavy.apply(gvec);
  CHECK(fh[0] == doctest::Approx(s * 1.0 / 1e9).epsilon(1e-3));
}

TEST_CASE("pseudo-inverse inverts on the range of the tiny operator") {
  const GridSpec g = tiny_grid();
  const DetectorArray det = offset_detectors(2, 2, g);
  const SensingMatrix L = assemble_sensing(g, det);
  const PseudoInverse inv = right_pseudo_inverse(L, 1e-8);
  Rng rng(102);
  Eigen::VectorXd f(L.entries.cols());
  for (int i = 0; i < f.size(); ++i) f[i] = rng.next_gaussian();
  const Eigen::VectorXd gvec = L.entries * f;
  const Eigen::VectorXd back = inv.project(gvec);
  CHECK((back - gvec).norm() <= 1e-4 * gvec.norm());
}

TEST_CASE("null probes are orthonormal and annihilated") {
  const GridSpec g = tiny_grid();
  const DetectorArray det = offset_detectors(2, 2, g);
  const SensingMatrix L = assemble_sensing(g, det);
  const auto probes = null_space_probe(L, 16);
  REQUIRE(probes.size() == 16);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.entries);
  const double spectral = svd.singularValues()[0];
  for (std::size_t a = 0; a < probes.size(); ++a) {
    CHECK((L.entries * probes[a]).norm() <= 1e-8 * spectral);
    for (std::size_t b = 0; b <= a; ++b) {
      const double dot = probes[a].dot(probes[b]);
      if (a == b) {
        CHECK(dot == doctest::Approx(1.0).epsilon(1e-12));
      } else {
        CHECK(std::abs(dot) <= 1e-12);
      }
    }
  }
}

TEST_CASE("null probe requests beyond the null space fail") {
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(2, 4);
  entries(0, 0) = 2.0;
  entries(1, 1) = 1.0;
  const SensingMatrix m = synthetic_rows(entries);
  CHECK(null_space_probe(m, 2).size() == 2);
  CHECK_THROWS_AS((void)null_space_probe(m, 3), Error);
  CHECK_THROWS_AS((void)null_space_probe(m, 5), Error);
}

TEST_CASE("annihilation score reference points") {
  Rng rng(103);
  std::vector<Eigen::VectorXd> vectors;
  Eigen::VectorXd v(12);
  for (int i = 0; i < 12; ++i) v[i] = rng.next_gaussian();
  vectors.push_back(v);

  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(1, 1);
  delta(0, 0) = 1.0;
  CHECK(annihilation_score(delta, vectors) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
  CHECK(annihilation_score(zero, vectors) == 0.0);

  // A filter orthogonal to every circular shift of a constant vector.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(2, 1);
  diff(0, 0) = 1.0;
  diff(1, 0) = -1.0;
  std::vector<Eigen::VectorXd> const_vec{ones};
  CHECK(annihilation_score(diff, const_vec) <= 1e-12);

  // Component blocks are scored independently.
  Eigen::VectorXd stacked(8);
  stacked.head(4) = Eigen::VectorXd::Ones(4);
  stacked.tail(4) = Eigen::VectorXd::Zero(4);
  stacked[4] = 2.0;
  std::vector<Eigen::VectorXd> two{stacked};
  CHECK(annihilation_score(diff, two, 2) > 0.0);
  CHECK_THROWS_AS((void)annihilation_score(diff, two, 3), Error);
}

TEST_CASE("sensing cache round trip") {
  const GridSpec g = tiny_grid();
  const DetectorArray det = offset_detectors(2, 2, g);
  const SensingMatrix L = assemble_sensing(g, det);
  const std::string path = "test_sensing_cache.bin";
  save_sensing(L, path);
  const SensingMatrix back = load_sensing(path);
  REQUIRE(back.entries.rows() == L.entries.rows());
  REQUIRE(back.entries.cols() == L.entries.cols());
  CHECK((back.entries - L.entries).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.grid.n_x == g.n_x);
  CHECK(back.detectors.count() == 2);
  std::remove(path.c_str());
}
