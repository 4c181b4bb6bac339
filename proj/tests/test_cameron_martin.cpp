#include <catch2/catch_amalgamated.hpp>

#include "wienerlab/cameron_martin.hpp"

using namespace wienerlab;

TEST_CASE("cm_norm_sq on the reference integrands", "[cameron_martin]") {
  const auto grid = make_uniform_grid(4);

  const auto zero = cm_from_derivatives(grid, {0.0, 0.0, 0.0, 0.0});
  REQUIRE(cm_norm_sq(zero) == 0.0);

  const auto unit = cm_from_derivatives(grid, {1.0, 1.0, 1.0, 1.0});
  REQUIRE(cm_norm_sq(unit) == Catch::Approx(1.0).margin(1e-15));

  // h_dot_k = t_k on the uniform 4-grid: sum t_k^2 * 0.25.
  const auto ramp = cm_from_derivatives(grid, {0.0, 0.25, 0.5, 0.75});
  const double expected = (0.0 + 0.0625 + 0.25 + 0.5625) * 0.25;
  REQUIRE(cm_norm_sq(ramp) == Catch::Approx(expected).margin(1e-15));
  REQUIRE(expected == 0.21875);
}

TEST_CASE("values telescope from the step derivatives", "[cameron_martin]") {
  const auto grid = make_geometric_grid(0.5, 2);
  const auto h = cm_from_derivatives(grid, {2.0, -1.0, 0.5});
  REQUIRE(h.value(0) == 0.0);
  REQUIRE(h.value(1) == Catch::Approx(2.0 * 0.25).margin(1e-15));
  REQUIRE(h.value(2) == Catch::Approx(0.5 - 0.25).margin(1e-15));
  REQUIRE(h.value(3) == Catch::Approx(0.25 + 0.5 * 0.5).margin(1e-15));
}

TEST_CASE("inner product requires matching grids", "[cameron_martin]") {
  const auto h = cm_from_derivatives(make_uniform_grid(4), {1.0, 1.0, 1.0, 1.0});
  const auto g = cm_from_derivatives(make_uniform_grid(8),
                                     {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  REQUIRE_THROWS_AS(cm_inner(h, g), std::invalid_argument);

  const auto g2 = cm_from_derivatives(make_uniform_grid(4), {0.0, 1.0, 0.0, -1.0});
  REQUIRE(cm_inner(h, g2) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(cm_inner(h, h) == Catch::Approx(cm_norm_sq(h)).margin(1e-15));
}

TEST_CASE("size mismatches are rejected", "[cameron_martin]") {
  REQUIRE_THROWS_AS(cm_from_derivatives(make_uniform_grid(4), {1.0, 2.0}),
                    std::invalid_argument);
  const auto grid = make_uniform_grid(2);
  REQUIRE_THROWS_AS(cm_norm_sq(std::vector<double>{1.0, 2.0, 3.0}, *grid),
                    std::invalid_argument);
}
