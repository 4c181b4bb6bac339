#pragma once

#include <cstddef>
#include <vector>

#include "wienerlab/sample_path.hpp"
#include "wienerlab/time_grid.hpp"

namespace wienerlab {

enum class Branching { Rademacher, GaussHermite };

/// Finite-support surrogate of the discretized Wiener measure: at each
/// step the increment takes one of `factor` atom values, chosen to match
/// the N(0, dt_k) moments (exactly up to order 2m-1 for m-node
/// Gauss-Hermite, order 3 for Rademacher).
class TreeModel {
 public:
  /// Rademacher: increments +-sqrt(dt_k) with probability 1/2.
  static TreeModel rademacher(GridPtr grid);
  /// Gauss-Hermite with m >= 2 nodes per step.
  static TreeModel gauss_hermite(GridPtr grid, int m);

  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] Branching branching() const noexcept { return branching_; }
  [[nodiscard]] int factor() const noexcept { return factor_; }
  [[nodiscard]] std::size_t steps() const noexcept { return grid_->steps(); }

  /// Atom values / probabilities for step k (size = factor()).
  [[nodiscard]] const std::vector<double>& atoms(std::size_t k) const { return atoms_[k]; }
  [[nodiscard]] const std::vector<double>& probabilities(std::size_t k) const {
    return probs_[k];
  }

  /// factor^steps, saturating at SIZE_MAX.
  [[nodiscard]] std::size_t path_count() const noexcept;

 private:
  TreeModel(GridPtr grid, Branching branching, int factor);

  GridPtr grid_;
  Branching branching_;
  int factor_;
  std::vector<std::vector<double>> atoms_;
  std::vector<std::vector<double>> probs_;
};

/// All increment combinations of the tree, weights multiplied per step.
/// Paths are ordered most-significant-digit first: paths sharing the
/// first k increments are contiguous.
struct TreePaths {
  PathEnsemble paths;
  std::vector<double> weights;  // sums to 1 within 1e-12
  int factor = 2;
};

inline constexpr std::size_t kDefaultTreeCap = 2'000'000;

/// Enumerates every path exactly once; throws std::length_error if
/// path_count() exceeds `cap`.
TreePaths enumerate_tree(const TreeModel& model, std::size_t cap = kDefaultTreeCap);

/// Nodes x_i and weights p_i with sum p_i = 1 for the standard normal:
/// int f dN(0,1) ~ sum p_i f(x_i); exact for polynomials of degree 2m-1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite_rule(int m);

}  // namespace wienerlab
