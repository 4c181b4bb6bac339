#pragma once

#include <span>
#include <vector>

#include "wienerlab/sample_path.hpp"
#include "wienerlab/time_grid.hpp"

namespace wienerlab {

/// Absolutely continuous path h with piecewise-constant derivative:
/// h_dot_k on [t_k, t_{k+1}), h(t_k) = sum_{j<k} h_dot_j dt_j.
/// The left-point convention keeps every stochastic sum predictable.
struct CameronMartinPath {
  GridPtr grid;
  int dim = 1;
  std::vector<double> step_derivatives;  // n*dim
  std::vector<double> values;            // (n+1)*dim, telescoped

  [[nodiscard]] std::size_t steps() const noexcept { return grid->steps(); }
  [[nodiscard]] double derivative(std::size_t k, int c = 0) const {
    return step_derivatives[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
  }
  [[nodiscard]] double value(std::size_t k, int c = 0) const {
    return values[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
  }
};

/// Builds the path from its step derivatives (values telescoped).
CameronMartinPath cm_from_derivatives(GridPtr grid, std::vector<double> step_derivatives,
                                      int dim = 1);

/// |h|_H^2 = sum_k |h_dot_k|^2 dt_k.
[[nodiscard]] double cm_norm_sq(const CameronMartinPath& h);

/// (h,g)_H = sum_k h_dot_k . g_dot_k dt_k. Grids must match.
[[nodiscard]] double cm_inner(const CameronMartinPath& h, const CameronMartinPath& g);

/// Norm on raw derivative rows (batch layer; dim 1).
[[nodiscard]] double cm_norm_sq(std::span<const double> step_derivatives, const TimeGrid& grid);

}  // namespace wienerlab
