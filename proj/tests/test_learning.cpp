#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "esi/framelets.hpp"
#include "esi/hankel.hpp"
#include "esi/learning.hpp"
#include "esi/rng.hpp"
#include "esi/sensing.hpp"

using namespace esi;

namespace {

Eigen::VectorXd band_signal(int q, int bin, double amp, double phase) {
  Eigen::VectorXd f(q);
  for (int n = 0; n < q; ++n)
    f[n] = amp * std::cos(2.0 * M_PI * bin * n / q + phase);
  return f;
}

LearnedBasis basis_from_signal(const Eigen::VectorXd& f, int p, int r) {
  const FrameletBasis fb = svd_basis(f, p, r);
  LearnedBasis b;
  b.psi = fb.psi;
  b.psi_dual = fb.psi_dual;
  b.pooling = PoolingFrame(FrameKind::identity, static_cast<int>(f.size()));
  return b;
}

LearnedBasis random_basis(int q, int p, int r, Rng& rng) {
  LearnedBasis b;
  b.pooling = PoolingFrame(FrameKind::identity, q);
  b.psi.resize(p, r);
  b.psi_dual.resize(p, r);
  for (int l = 0; l < r; ++l)
    for (int i = 0; i < p; ++i) {
      b.psi(i, l) = rng.next_gaussian();
      b.psi_dual(i, l) = rng.next_gaussian();
    }
  return b;
}

TrainingPair random_pair(int q, Rng& rng) {
  TrainingPair pair;
  pair.input.resize(q);
  pair.target.resize(q);
  for (int i = 0; i < q; ++i) {
    pair.input[i] = rng.next_gaussian();
    pair.target[i] = rng.next_gaussian();
  }
  return pair;
}

}  // namespace

TEST_CASE("svd filters reproduce their own hankel space") {
  const int q = 64, p = 8;
  const Eigen::VectorXd f =
      band_signal(q, 3, 1.2, 0.4) + band_signal(q, 7, 0.7, 1.9);
  REQUIRE(numerical_rank(lift(f, p)) == 4);
  const LearnedBasis b = basis_from_signal(f, p, 4);
  const Eigen::VectorXd out = apply_K(f, b, false);
  CHECK((out - f).norm() <= 1e-9 * f.norm());

  CHECK(apply_K(Eigen::VectorXd::Zero(q), b, false).norm() == 0.0);
}

TEST_CASE("inactive relu equals the linear path") {
  const int q = 16;
  Eigen::VectorXd f(q);
  for (int i = 0; i < q; ++i) f[i] = 2.0 + std::sin(0.3 * i);
  LearnedBasis b;
  b.pooling = PoolingFrame(FrameKind::identity, q);
  b.psi = Eigen::MatrixXd::Zero(1, 1);
  b.psi(0, 0) = 1.0;
  b.psi_dual = b.psi;
  const Eigen::VectorXd lin = apply_K(f, b, false);
  const Eigen::VectorXd rel = apply_K(f, b, true);
  CHECK((lin - rel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training on input equal target starts at the fixed point") {
  const int q = 32, p = 6;
  const Eigen::VectorXd f = band_signal(q, 2, 1.0, 0.7);
  std::vector<TrainingPair> pairs{{f, f}, {f, f}};
  const LearnedBasis b = train(pairs, p, 2, false, 10, 0.05, 1);
  CHECK(b.loss_trace.front() <= 1e-10);
  CHECK(b.loss_trace.back() <= 1e-10);
}

TEST_CASE("zero learning rate freezes the basis") {
  const int q = 24;
  Rng rng(111);
  std::vector<TrainingPair> pairs{random_pair(q, rng), random_pair(q, rng)};
  const LearnedBasis frozen = train(pairs, 5, 2, false, 7, 0.0, 1);
  const LearnedBasis init = train(pairs, 5, 2, false, 0, 0.0, 1);
  CHECK((frozen.psi - init.psi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((frozen.psi_dual - init.psi_dual).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(frozen.loss_trace.size() == 8);
  for (double v : frozen.loss_trace) CHECK(v == frozen.loss_trace[0]);
}

TEST_CASE("descent on a contaminated narrowband task") {
  const int q = 64, p = 8;
  Rng rng(112);
  std::vector<TrainingPair> pairs;
  for (int l = 0; l < 4; ++l) {
    const Eigen::VectorXd target =
        band_signal(q, 3, rng.uniform(0.5, 1.5), rng.uniform(0.0, 6.28));
    Eigen::VectorXd noise = Eigen::VectorXd::Zero(q);
    for (int bin : {20, 22, 24})
      noise += band_signal(q, bin, rng.uniform(0.2, 0.5),
                           rng.uniform(0.0, 6.28));
    pairs.push_back({target + noise, target});
  }
  const LearnedBasis b = train(pairs, p, 2, false, 400, 1e-2, 1);
  CHECK(b.loss_trace.back() <= 0.1 * b.loss_trace.front());

  // Accepted steps never increase the loss.
  for (std::size_t i = 1; i < b.loss_trace.size(); ++i)
    CHECK(b.loss_trace[i] <= b.loss_trace[i - 1] + 1e-12);

  const LearnedBasis again = train(pairs, p, 2, false, 400, 1e-2, 1);
  REQUIRE(again.loss_trace.size() == b.loss_trace.size());
  for (std::size_t i = 0; i < b.loss_trace.size(); ++i)
    CHECK(again.loss_trace[i] == b.loss_trace[i]);
}

TEST_CASE("analytic gradients match central differences") {
  const int q = 32, p = 6, r = 2;
  Rng rng(11);
  const LearnedBasis b = random_basis(q, p, r, rng);
  const TrainingPair pair = random_pair(q, rng);
  CHECK(finite_difference_check(b, pair, false) <= 1e-6);
  CHECK(finite_difference_check(b, pair, true) <= 1e-5);
}

TEST_CASE("gradient check detects the relu kink") {
  const int q = 8;
  LearnedBasis b;
  b.pooling = PoolingFrame(FrameKind::identity, q);
  b.psi = Eigen::MatrixXd::Zero(1, 1);
  b.psi(0, 0) = 1.0;
  b.psi_dual = b.psi;
  TrainingPair pair;
  pair.input = Eigen::VectorXd::Ones(q);
  pair.input[3] = 1e-5;
  pair.target = Eigen::VectorXd::Zero(q);
  CHECK_THROWS_AS((void)finite_difference_check(b, pair, true), Error);
}

TEST_CASE("zero encoder filters kill the decoder gradient") {
  const int q = 16, p = 4, r = 2;
  Rng rng(113);
  LearnedBasis b = random_basis(q, p, r, rng);
  b.psi.setZero();
  const TrainingPair pair = random_pair(q, rng);
  std::vector<TrainingPair> pairs{pair, pair};
  const double base = training_loss(pairs, b, false);
  for (int l = 0; l < r; ++l)
    for (int i = 0; i < p; ++i) {
      LearnedBasis pert = b;
      pert.psi_dual(i, l) += 1e-4;
      CHECK(training_loss(pairs, pert, false) == base);
    }
}

TEST_CASE("training input validation") {
  const int q = 16;
  Rng rng(114);
  std::vector<TrainingPair> one{random_pair(q, rng)};
  CHECK_THROWS_AS((void)train(one, 4, 2, false, 1, 0.1, 1), Error);

  std::vector<TrainingPair> pairs{random_pair(q, rng), random_pair(q, rng)};
  CHECK_THROWS_AS((void)train(pairs, 17, 2, false, 1, 0.1, 1), Error);
  CHECK_THROWS_AS((void)train(pairs, 4, 5, false, 1, 0.1, 1), Error);
  CHECK_THROWS_AS((void)train(pairs, 4, 2, false, -1, 0.1, 1), Error);
  CHECK_THROWS_AS((void)train(pairs, 4, 2, false, 1, -0.5, 1), Error);

  std::vector<TrainingPair> ragged = pairs;
  ragged[1].target = Eigen::VectorXd::Zero(q + 1);
  CHECK_THROWS_AS((void)training_loss(ragged, random_basis(q, 4, 2, rng),
                                      false),
                  Error);
}

TEST_CASE("per-sample weights rescale the loss") {
  const int q = 12;
  Rng rng(115);
  std::vector<TrainingPair> pairs{random_pair(q, rng), random_pair(q, rng)};
  const LearnedBasis b = random_basis(q, 3, 2, rng);
  const double plain = training_loss(pairs, b, false);
  const Eigen::VectorXd twos = Eigen::VectorXd::Constant(q, 2.0);
  CHECK(training_loss(pairs, b, false, twos) ==
        doctest::Approx(2.0 * plain).epsilon(1e-13));
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(q);
  CHECK(training_loss(pairs, b, false, zeros) == 0.0);
}

TEST_CASE("saving a trained basis writes the filters and the trace") {
  const int q = 16;
  Rng rng(116);
  std::vector<TrainingPair> pairs{random_pair(q, rng), random_pair(q, rng)};
  const LearnedBasis b = train(pairs, 4, 2, false, 3, 1e-2, 1);
  const std::string path = "test_learned_basis.json";
  save_learned(b, path);
  const FrameletBasis fb = load_basis(path);
  CHECK(fb.pencil == 4);
  CHECK(fb.rank_budget == 2);
  CHECK((fb.psi - b.psi).cwiseAbs().maxCoeff() == 0.0);
  std::FILE* f = std::fopen((path + ".loss.csv").c_str(), "r");
  REQUIRE(f != nullptr);
  std::fclose(f);
  std::remove(path.c_str());
  std::remove((path + ".loss.csv").c_str());
}
