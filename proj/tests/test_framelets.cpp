#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "esi/framelets.hpp"
#include "esi/hankel.hpp"
#include "esi/rng.hpp"

using namespace esi;

namespace {

// Exact circular-Hankel rank r: DC contributes 1, every cosine 2.
Eigen::VectorXd rank_r_signal(int q, int r, Rng& rng) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(q);
  int left = r;
  if (left % 2 == 1) {
    f.array() += rng.uniform(0.5, 2.0);
    left -= 1;
  }
  std::vector<int> bins;
  while (left > 0) {
    const int bin = 1 + static_cast<int>(rng.next_u64() % (q / 2 - 1));
    bool fresh = true;
    for (int b : bins) fresh &= b != bin;
    if (!fresh) continue;
    bins.push_back(bin);
    const double amp = rng.uniform(0.5, 2.0);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    for (int n = 0; n < q; ++n)
      f[n] += amp * std::cos(2.0 * M_PI * bin * n / q + phase);
    left -= 2;
  }
  return f;
}

}  // namespace

TEST_CASE("svd basis reconstructs rank-r signals") {
  const int q = 64, p = 8;
  Rng rng(2);
  for (int r = 1; r <= 5; ++r) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd f = rank_r_signal(q, r, rng);
      REQUIRE(numerical_rank(lift(f, p)) == r);
      const FrameletBasis b = svd_basis(f, p, r);
      const Eigen::VectorXd back = reconstruct(coefficients(f, b), b);
      CHECK((back - f).norm() <= 1e-9 * f.norm());
    }
  }
}

TEST_CASE("lifted and unlifted coefficient paths agree") {
  const int q = 64, p = 8;
  Rng rng(6);
  Eigen::VectorXd f(q), g(q);
  for (int i = 0; i < q; ++i) f[i] = rng.next_gaussian();
  for (int i = 0; i < q; ++i) g[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, p, 5);
  const Eigen::MatrixXd lifted = coefficients(g, b).values;
  const Eigen::MatrixXd direct = coefficients_unlifted(g, b).values;
  CHECK((lifted - direct).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("both decoder paths agree for identity frames") {
  const int q = 32, p = 6;
  Rng rng(8);
  Eigen::VectorXd f(q), g(q);
  for (int i = 0; i < q; ++i) f[i] = rng.next_gaussian();
  for (int i = 0; i < q; ++i) g[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, p, 4);
  const FrameletCoefficients c = coefficients(g, b);
  const Eigen::VectorXd a = reconstruct(c, b);
  const Eigen::VectorXd u = reconstruct_unlifted(c, b);
  CHECK((a - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("complete orthonormal filters give the identity map") {
  const int q = 32, p = 8;
  Rng rng(12);
  Eigen::VectorXd f(q), g(q);
  for (int i = 0; i < q; ++i) f[i] = rng.next_gaussian();
  for (int i = 0; i < q; ++i) g[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, p, p);
  const Eigen::VectorXd back = reconstruct(coefficients(g, b), b);
  CHECK((back - g).norm() <= 1e-10 * g.norm());
}

TEST_CASE("frame condition and projection diagnostics") {
  Rng rng(15);
  Eigen::VectorXd f(24);
  for (int i = 0; i < 24; ++i) f[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, 6, 3);
  CHECK(frame_condition_error(b) <= 1e-12);
  CHECK(projection_error(b) <= 1e-12);

  FrameletBasis bad = b;
  bad.phi_dual = 2.0 * bad.phi_dual;
  CHECK(frame_condition_error(bad) == doctest::Approx(1.0).epsilon(1e-12));
  bad = b;
  bad.psi = 2.0 * bad.psi;
  CHECK(projection_error(bad) > 0.5);
}

TEST_CASE("relu coefficients clip at zero") {
  Rng rng(18);
  Eigen::VectorXd f(16), g(16);
  for (int i = 0; i < 16; ++i) f[i] = rng.next_gaussian();
  for (int i = 0; i < 16; ++i) g[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, 4, 2);
  const Eigen::MatrixXd lin = coefficients(g, b).values;
  const Eigen::MatrixXd clipped = relu_coefficients(g, b).values;
  CHECK(clipped.minCoeff() >= 0.0);
  CHECK((clipped - lin.cwiseMax(0.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("basis matrices are the rank-one expansion elements") {
  Rng rng(25);
  Eigen::VectorXd f(12);
  for (int i = 0; i < 12; ++i) f[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, 4, 3);
  const Eigen::MatrixXd b23 = basis_matrices(b, 2, 3);
  CHECK(b23.rows() == 12);
  CHECK(b23.cols() == 4);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(b23(i, j) ==
            doctest::Approx(b.phi_dual(i, 1) * b.psi_dual(j, 2)));
  CHECK_THROWS_AS((void)basis_matrices(b, 0, 1), Error);
  CHECK_THROWS_AS((void)basis_matrices(b, 1, 4), Error);

  Eigen::MatrixXd c(12, 3);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = rng.next_gaussian();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(12, 4);
  for (int k = 1; k <= 12; ++k)
    for (int l = 1; l <= 3; ++l)
      sum += c(k - 1, l - 1) * basis_matrices(b, k, l);
  const Eigen::MatrixXd direct = b.phi_dual * c * b.psi_dual.transpose();
  CHECK((sum - direct).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single-channel encode is a circular correlation") {
  Rng rng(31);
  Eigen::VectorXd g(10), taps(3);
  for (int i = 0; i < 10; ++i) g[i] = rng.next_gaussian();
  for (int i = 0; i < 3; ++i) taps[i] = rng.next_gaussian();
  const LayerSpec l = make_layer(3, 1, 1, taps, taps);
  Eigen::MatrixXd in(10, 1);
  in.col(0) = g;
  const Eigen::MatrixXd out = layer_encode(in, l);
  CHECK((out.col(0) - circ_correlate(g, taps)).cwiseAbs().maxCoeff() <=
        1e-14);
  const Eigen::MatrixXd dec = layer_decode(out, l);
  CHECK((dec.col(0) - circ_convolve(out.col(0), taps) / 3.0)
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
}

TEST_CASE("cascade collapses a two-layer chain") {
  Rng rng(40);
  const int q = 20;
  auto fill = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
    return m;
  };
  const LayerSpec l1 = make_layer(3, 1, 2, fill(3, 2), fill(3, 2));
  const LayerSpec l2 = make_layer(4, 2, 1, fill(8, 1), fill(8, 1));
  const LayerSpec eff = cascade_filters({l1, l2});
  CHECK(eff.filter_len == 6);
  CHECK(eff.in_channels == 1);
  CHECK(eff.out_channels == 1);

  Eigen::MatrixXd in(q, 1);
  for (int i = 0; i < q; ++i) in(i, 0) = rng.next_gaussian();
  const Eigen::MatrixXd enc_seq = layer_encode(layer_encode(in, l1), l2);
  const Eigen::MatrixXd enc_eff = layer_encode(in, eff);
  CHECK((enc_seq - enc_eff).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::MatrixXd dec_seq = layer_decode(layer_decode(enc_seq, l2), l1);
  const Eigen::MatrixXd dec_eff = layer_decode(enc_seq, eff);
  CHECK((dec_seq - dec_eff).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("multilayer forward with complete filters is the identity") {
  const int q = 32, p = 8;
  Rng rng(44);
  Eigen::VectorXd f(q), g(q);
  for (int i = 0; i < q; ++i) f[i] = rng.next_gaussian();
  for (int i = 0; i < q; ++i) g[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, p, p);
  const LayerSpec l = make_layer(p, 1, p, b.psi, b.psi_dual);
  const std::vector<LayerSpec> layers{l};
  const std::vector<PoolingFrame> frames{PoolingFrame(FrameKind::identity, q)};
  const Eigen::VectorXd out = multilayer_forward(g, layers, frames, false);
  CHECK((out - g).norm() <= 1e-10 * g.norm());

  const std::vector<PoolingFrame> dual{
      PoolingFrame(FrameKind::dual_frame, q)};
  const Eigen::VectorXd out2 = multilayer_forward(g, layers, dual, false);
  CHECK((out2 - g).norm() <= 1e-10 * g.norm());
}

TEST_CASE("relu path matches the linear path on nonnegative coefficients") {
  const int q = 16;
  Eigen::VectorXd g(q);
  for (int i = 0; i < q; ++i) g[i] = 1.0 + 0.1 * i;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(1, 1);
  delta(0, 0) = 1.0;
  const LayerSpec l = make_layer(1, 1, 1, delta, delta);
  const std::vector<LayerSpec> layers{l};
  const std::vector<PoolingFrame> frames{PoolingFrame(FrameKind::identity, q)};
  const Eigen::VectorXd lin = multilayer_forward(g, layers, frames, false);
  const Eigen::VectorXd rel = multilayer_forward(g, layers, frames, true);
  CHECK((lin - rel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("basis json round trip") {
  Rng rng(50);
  Eigen::VectorXd f(20);
  for (int i = 0; i < 20; ++i) f[i] = rng.next_gaussian();
  const FrameletBasis b = svd_basis(f, 5, 3);
  const FrameletBasis back = basis_from_json(basis_to_json(b));
  CHECK((back.phi - b.phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.psi - b.psi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.psi_dual - b.psi_dual).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.pencil == 5);
  CHECK(back.rank_budget == 3);

  const std::string path = "test_basis_roundtrip.json";
  save_basis(b, path);
  const FrameletBasis loaded = load_basis(path);
  CHECK((loaded.psi - b.psi).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
