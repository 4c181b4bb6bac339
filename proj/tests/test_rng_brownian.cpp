#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wienerlab/parallel.hpp"
#include "wienerlab/rng.hpp"
#include "wienerlab/sample_path.hpp"

using namespace wienerlab;

TEST_CASE("philox blocks are pure functions of key and counter", "[rng]") {
  const auto a = Philox4x32::block(42, {1, 2, 3, 4});
  const auto b = Philox4x32::block(42, {1, 2, 3, 4});
  REQUIRE(a == b);
  REQUIRE(a != Philox4x32::block(43, {1, 2, 3, 4}));
  REQUIRE(a != Philox4x32::block(42, {1, 2, 3, 5}));
}

TEST_CASE("same (seed, path index) reproduces the path bit for bit", "[rng][brownian]") {
  const auto grid = make_uniform_grid(64);
  const SamplePath a = sample_brownian_path(grid, 1, 7, 11);
  const SamplePath b = sample_brownian_path(grid, 1, 7, 11);
  REQUIRE(a.values == b.values);
  const SamplePath c = sample_brownian_path(grid, 7, 1, 12);
  REQUIRE(a.values != c.values);
}

TEST_CASE("ensemble rows equal standalone substreams regardless of threads",
          "[rng][brownian]") {
  const auto grid = make_uniform_grid(16);
  set_max_threads(2);
  const PathEnsemble two = sample_brownian(grid, 1, 99, 257);
  set_max_threads(1);
  const PathEnsemble one = sample_brownian(grid, 1, 99, 257);
  set_max_threads(0);
  REQUIRE(one.values == two.values);

  const SamplePath lone = sample_brownian_path(grid, 1, 99, 200);
  const auto row = two.path_values(200);
  REQUIRE(std::equal(row.begin(), row.end(), lone.values.begin()));
}

TEST_CASE("terminal value moments match the Wiener measure", "[brownian][statistical]") {
  const auto grid = make_uniform_grid(32);
  const std::size_t count = 100000;
  const PathEnsemble e = sample_brownian(grid, 1, 2024, count);

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    const double w1 = e.path_values(p).back();
    sum += w1;
    sum_sq += w1 * w1;
  }
  const double mean = sum / static_cast<double>(count);
  const double var = (sum_sq - count * mean * mean) / static_cast<double>(count - 1);

  // Var W(1) = sum dt_k = 1; mean 0. 3 standard errors each.
  const double se_mean = 1.0 / std::sqrt(static_cast<double>(count));
  const double se_var = std::sqrt(2.0 / static_cast<double>(count - 1));
  REQUIRE(std::fabs(mean) <= 3.0 * se_mean);
  REQUIRE(std::fabs(var - 1.0) <= 3.0 * se_var);
}

TEST_CASE("per-step increments pass mean and variance checks at 4 sigma",
          "[brownian][statistical]") {
  const auto grid = make_geometric_grid(0.5, 3, 2);
  const std::size_t count = 100000;
  const PathEnsemble e = sample_brownian(grid, 1, 5, count);
  const std::size_t n = grid->steps();

  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
      const auto row = e.path_values(p);
      const double dw = row[k + 1] - row[k];
      sum += dw;
      sum_sq += dw * dw;
    }
    const double mean = sum / static_cast<double>(count);
    const double var = (sum_sq - count * mean * mean) / static_cast<double>(count - 1);
    const double dt = grid->dt(k);
    CAPTURE(k, dt);
    REQUIRE(std::fabs(mean) <= 4.0 * std::sqrt(dt / static_cast<double>(count)));
    REQUIRE(std::fabs(var - dt) <= 4.0 * dt * std::sqrt(2.0 / static_cast<double>(count - 1)));
  }
}

TEST_CASE("path construction validates its inputs", "[brownian]") {
  const auto grid = make_uniform_grid(2);
  REQUIRE_THROWS_AS(path_from_values(grid, {0.5, 1.0, 2.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(path_from_values(grid, {0.0, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_brownian(grid, 0, 1, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_brownian(grid, 1, 1, 0), std::invalid_argument);

  const SamplePath p = path_from_values(grid, {0.0, 0.25, -0.5});
  REQUIRE(p.increments == std::vector<double>{0.25, -0.75});
}
