#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wienerlab/tree_model.hpp"

using namespace wienerlab;

TEST_CASE("rademacher tree enumerates the product measure", "[tree]") {
  const auto grid = make_uniform_grid(2);
  const TreeModel model = TreeModel::rademacher(grid);
  const TreePaths tree = enumerate_tree(model);
  REQUIRE(tree.paths.count == 4);
  for (double w : tree.weights) REQUIRE(w == 0.25);

  const double s = std::sqrt(0.5);
  // Most-significant digit first: (-,-), (-,+), (+,-), (+,+).
  REQUIRE(tree.paths.path_values(0)[1] == Catch::Approx(-s));
  REQUIRE(tree.paths.path_values(0)[2] == Catch::Approx(-2 * s));
  REQUIRE(tree.paths.path_values(1)[2] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(tree.paths.path_values(3)[2] == Catch::Approx(2 * s));
}

TEST_CASE("three-node Gauss-Hermite matches the closed form", "[tree]") {
  const GaussHermiteRule rule = gauss_hermite_rule(3);
  REQUIRE(rule.nodes[0] == Catch::Approx(-std::sqrt(3.0)).margin(1e-12));
  REQUIRE(rule.nodes[1] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(rule.nodes[2] == Catch::Approx(std::sqrt(3.0)).margin(1e-12));
  REQUIRE(rule.weights[0] == Catch::Approx(1.0 / 6.0).margin(1e-12));
  REQUIRE(rule.weights[1] == Catch::Approx(2.0 / 3.0).margin(1e-12));
  REQUIRE(rule.weights[2] == Catch::Approx(1.0 / 6.0).margin(1e-12));

  // On a one-step grid with dt = 1 the atoms are the nodes themselves.
  const auto grid = make_uniform_grid(1);
  const TreeModel model = TreeModel::gauss_hermite(grid, 3);
  REQUIRE(model.atoms(0)[0] == Catch::Approx(-std::sqrt(3.0)).margin(1e-12));
  REQUIRE(model.atoms(0)[2] == Catch::Approx(std::sqrt(3.0)).margin(1e-12));
}

TEST_CASE("atom moments match N(0, dt) to 1e-12", "[tree]") {
  const auto grid = make_geometric_grid(0.5, 3, 2);
  for (int m = 2; m <= 5; ++m) {
    const TreeModel model = TreeModel::gauss_hermite(grid, m);
    for (std::size_t k = 0; k < model.steps(); ++k) {
      double mean = 0.0, var = 0.0, third = 0.0, psum = 0.0;
      for (int i = 0; i < model.factor(); ++i) {
        const double x = model.atoms(k)[i];
        const double p = model.probabilities(k)[i];
        psum += p;
        mean += p * x;
        var += p * x * x;
        third += p * x * x * x;
      }
      CAPTURE(m, k);
      REQUIRE(std::fabs(psum - 1.0) <= 1e-12);
      REQUIRE(std::fabs(mean) <= 1e-12);
      REQUIRE(std::fabs(var - grid->dt(k)) <= 1e-12);
      REQUIRE(std::fabs(third) <= 1e-12);
    }
  }

  // Degree-5 exactness for m = 3: fourth moment 3 dt^2.
  const TreeModel gh3 = TreeModel::gauss_hermite(grid, 3);
  for (std::size_t k = 0; k < gh3.steps(); ++k) {
    double fourth = 0.0;
    for (int i = 0; i < 3; ++i) {
      fourth += gh3.probabilities(k)[i] * std::pow(gh3.atoms(k)[i], 4);
    }
    REQUIRE(fourth == Catch::Approx(3.0 * gh3.grid()->dt(k) * gh3.grid()->dt(k)).margin(1e-12));
  }
}

TEST_CASE("enumeration weights multiply and sum to one", "[tree]") {
  const auto grid = make_uniform_grid(5);
  const TreeModel model = TreeModel::gauss_hermite(grid, 3);
  const TreePaths tree = enumerate_tree(model);
  REQUIRE(tree.paths.count == 243);
  double total = 0.0;
  for (double w : tree.weights) total += w;
  REQUIRE(std::fabs(total - 1.0) <= 1e-12);
}

TEST_CASE("the path cap rejects oversized trees", "[tree]") {
  const auto grid = make_uniform_grid(25);
  const TreeModel model = TreeModel::rademacher(grid);
  REQUIRE_THROWS_AS(enumerate_tree(model), std::length_error);
  REQUIRE_NOTHROW(enumerate_tree(TreeModel::rademacher(make_uniform_grid(10))));
}
