#include "doctest.h"

#include <cmath>

#include "esi/rng.hpp"
#include "esi/tv.hpp"

using namespace esi;

namespace {

ScalarField noisy_field(int rows, int cols, Rng& rng) {
  ScalarField f(rows, cols);
  for (double& v : f.data) v = rng.next_double();
  return f;
}

}  // namespace

TEST_CASE("tv value by hand on a 2x2 image") {
  ScalarField f(2, 2);
  f.at(0, 0) = 0.0;
  f.at(0, 1) = 1.0;
  f.at(1, 0) = 2.0;
  f.at(1, 1) = 3.0;
  CHECK(tv_value(f) == doctest::Approx(std::sqrt(5.0) + 3.0).epsilon(1e-14));
}

TEST_CASE("objective splits into fidelity and penalty") {
  Rng rng(70);
  const ScalarField b = noisy_field(5, 5, rng);
  ScalarField x = b;
  for (double& v : x.data) v += 0.1;
  const double expected = 0.5 * 25 * 0.1 * 0.1 + 0.3 * tv_value(x);
  CHECK(tv_objective(x, b, 0.3) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gamma zero returns the input untouched") {
  Rng rng(71);
  const ScalarField b = noisy_field(7, 9, rng);
  TVParams params;
  params.gamma = 0.0;
  const ScalarField out = tv_denoise(b, params);
  REQUIRE(out.data.size() == b.data.size());
  for (std::size_t i = 0; i < b.data.size(); ++i)
    CHECK(out.data[i] == b.data[i]);
}

TEST_CASE("constant images are fixed points") {
  ScalarField b(4, 4);
  for (double& v : b.data) v = 0.7;
  TVParams params;
  params.gamma = 0.05;
  const ScalarField out = tv_denoise(b, params);
  for (double v : out.data) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("two-pixel closed form") {
  // For [A, B] with A - B > 2 gamma the prox shrinks the gap by 2 gamma.
  ScalarField b(1, 2);
  b.at(0, 0) = 1.0;
  b.at(0, 1) = 0.0;
  TVParams params;
  params.gamma = 0.1;
  params.max_iters = 20000;
  params.tol = 0.0;
  const ScalarField out = tv_denoise(b, params);
  CHECK(out.at(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(out.at(0, 1) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("denoising never increases the objective") {
  Rng rng(72);
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField b = noisy_field(16, 16, rng);
    TVParams params;
    params.gamma = 0.02 + 0.05 * trial;
    const ScalarField out = tv_denoise(b, params);
    CHECK(tv_objective(out, b, params.gamma) <=
          tv_objective(b, b, params.gamma) + 1e-12);
  }
}

TEST_CASE("stronger regularization flattens more") {
  Rng rng(73);
  const ScalarField b = noisy_field(12, 12, rng);
  TVParams weak, strong;
  weak.gamma = 0.01;
  strong.gamma = 0.5;
  const double tv_weak = tv_value(tv_denoise(b, weak));
  const double tv_strong = tv_value(tv_denoise(b, strong));
  CHECK(tv_strong < tv_weak);
}

TEST_CASE("tv parameter validation") {
  const ScalarField b(3, 3);
  TVParams params;
  params.gamma = -0.1;
  CHECK_THROWS_AS((void)tv_denoise(b, params), Error);
  params.gamma = 0.1;
  params.max_iters = 0;
  CHECK_THROWS_AS((void)tv_denoise(b, params), Error);
  params.max_iters = 10;
  params.tol = -1.0;
  CHECK_THROWS_AS((void)tv_denoise(b, params), Error);
  ScalarField bad(2, 2);
  bad.at(0, 0) = std::nan("");
  TVParams ok;
  ok.gamma = 0.1;
  CHECK_THROWS_AS((void)tv_denoise(bad, ok), Error);
}
