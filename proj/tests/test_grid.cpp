#include "doctest.h"

#include <cmath>

#include "esi/grid.hpp"

using esi::ErrorCode;
using esi::GridSpec;
using esi::make_grid;

TEST_CASE("reference configuration constructs with exact steps") {
  GridSpec g = make_grid(4.0, 128, 2.0, 64, 1.0, 1.0, 16);
  CHECK(g.h_x == 0.03125);
  CHECK(g.h_t == 0.03125);
  CHECK(g.c_p() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g.c_s() == 1.0);
}

TEST_CASE("zero lambda is a valid Lame pair") {
  GridSpec g = make_grid(4.0, 128, 2.0, 64, 0.0, 1.0, 16);
  CHECK(g.c_p() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("coarse grid with thin PML violates stability") {
  // h_t = 0.25 against a PML crossing bound of 2*0.25/sqrt(3*2) ~ 0.204.
  CHECK_THROWS_WITH_AS(make_grid(4.0, 16, 2.0, 8, 1.0, 1.0, 2),
                       doctest::Contains("StabilityViolation"), esi::Error);
}

TEST_CASE("invalid Lame parameters are rejected") {
  CHECK_THROWS_AS(make_grid(4.0, 128, 2.0, 64, 1.0, -1.0, 16), esi::Error);
  CHECK_THROWS_AS(make_grid(4.0, 128, 2.0, 64, -5.0, 1.0, 16), esi::Error);
}

TEST_CASE("non power of two sizes are rejected") {
  CHECK_THROWS_AS(make_grid(4.0, 100, 2.0, 64, 1.0, 1.0, 16), esi::Error);
  CHECK_THROWS_AS(make_grid(4.0, 128, 2.0, 63, 1.0, 1.0, 16), esi::Error);
}

TEST_CASE("coordinates and crop cover [-1,1) exactly") {
  GridSpec g = make_grid(4.0, 128, 2.0, 64, 1.0, 1.0, 16);
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(64) == 0.0);
  CHECK(g.crop_lo() == 32);
  CHECK(g.crop_n() == 64);
  CHECK(g.x(g.crop_lo()) == -1.0);
  CHECK(g.x(g.crop_lo() + g.crop_n() - 1) == doctest::Approx(1.0 - g.h_x));

  GridSpec tiny = make_grid(2.0, 2, 2.0, 8, 1.0, 1.0, 0);
  CHECK(tiny.crop_lo() == 0);
  CHECK(tiny.crop_n() == 2);
}

TEST_CASE("json round trip preserves every field") {
  GridSpec g = make_grid(4.0, 64, 2.0, 32, 2.0, 1.5, 8);
  GridSpec h = esi::grid_from_json(esi::grid_to_json(g));
  CHECK(h.beta == g.beta);
  CHECK(h.n_x == g.n_x);
  CHECK(h.h_x == g.h_x);
  CHECK(h.t_max == g.t_max);
  CHECK(h.n_t == g.n_t);
  CHECK(h.h_t == g.h_t);
  CHECK(h.lambda == g.lambda);
  CHECK(h.mu == g.mu);
  CHECK(h.pml_width == g.pml_width);
}

TEST_CASE("json with inconsistent steps is rejected") {
  GridSpec g = make_grid(4.0, 64, 2.0, 32, 1.0, 1.0, 8);
  std::string text = esi::grid_to_json(g);
  auto pos = text.find("\"h_x\"");
  REQUIRE(pos != std::string::npos);
  std::string bad = text;
  bad.replace(pos, std::string("\"h_x\": 0.0625").size(), "\"h_x\": 0.0626");
  CHECK_THROWS_AS(esi::grid_from_json(bad), esi::Error);
}
