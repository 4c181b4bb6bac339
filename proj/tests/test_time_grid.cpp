#include <catch2/catch_amalgamated.hpp>

#include "wienerlab/time_grid.hpp"

using namespace wienerlab;

TEST_CASE("uniform grid is the arithmetic partition", "[time_grid]") {
  const auto grid = make_uniform_grid(4);
  REQUIRE(grid->points() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  REQUIRE(grid->steps() == 4);
  REQUIRE(grid->kind() == GridKind::Uniform);
}

TEST_CASE("geometric grid holds the breakpoint powers", "[time_grid]") {
  const auto grid = make_geometric_grid(0.5, 3);
  REQUIRE(grid->points() == std::vector<double>{0.0, 0.125, 0.25, 0.5, 1.0});

  const auto refined = make_geometric_grid(0.5, 3, 2);
  REQUIRE(refined->steps() == 8);
  for (int k = 0; k <= 3; ++k) {
    CAPTURE(k);
    REQUIRE(refined->index_of(std::pow(0.5, k)) != TimeGrid::npos);
  }
}

TEST_CASE("degenerate grid parameters are rejected", "[time_grid]") {
  REQUIRE_THROWS_AS(make_uniform_grid(0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_geometric_grid(1.0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(make_geometric_grid(0.0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(make_geometric_grid(0.5, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_explicit_grid({0.0, 0.5, 0.25, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_explicit_grid({0.1, 0.5, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_explicit_grid({0.0, 0.5}), std::invalid_argument);
}

TEST_CASE("step lengths sum to the horizon", "[time_grid]") {
  for (std::size_t n : {1u, 7u, 64u, 1000u}) {
    const auto grid = make_uniform_grid(n);
    double total = 0.0;
    for (std::size_t k = 0; k < grid->steps(); ++k) total += grid->dt(k);
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  }
  const auto geo = make_geometric_grid(0.3, 5, 3);
  double total = 0.0;
  for (std::size_t k = 0; k < geo->steps(); ++k) total += geo->dt(k);
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("index_of locates grid points within tolerance", "[time_grid]") {
  const auto grid = make_uniform_grid(128);
  REQUIRE(grid->index_of(0.5) == 64);
  REQUIRE(grid->index_of(0.125) == 16);
  REQUIRE(grid->index_of(0.1) == TimeGrid::npos);
}
