#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wienerlab/time_grid.hpp"

namespace wienerlab {

/// Discretized path: values W(t_k) with W(0) = 0, plus the increments
/// dW_k = W(t_{k+1}) - W(t_k). Layout is interleaved for dim > 1:
/// values[k*dim + c].
struct SamplePath {
  GridPtr grid;
  int dim = 1;
  std::vector<double> values;      // (n+1)*dim
  std::vector<double> increments;  // n*dim

  [[nodiscard]] std::size_t steps() const noexcept { return grid->steps(); }
  [[nodiscard]] double value(std::size_t k, int c = 0) const {
    return values[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
  }
  [[nodiscard]] double increment(std::size_t k, int c = 0) const {
    return increments[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
  }
};

/// Builds a path from values (increments derived) or increments (values
/// telescoped). Throws if values[0] != 0.
SamplePath path_from_values(GridPtr grid, std::vector<double> values, int dim = 1);
SamplePath path_from_increments(GridPtr grid, std::vector<double> increments, int dim = 1);

/// Batch of paths sharing one grid, path-major: values[p][point k].
/// Immutable after construction; safe to share across threads.
struct PathEnsemble {
  GridPtr grid;
  int dim = 1;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // count * (n+1) * dim

  [[nodiscard]] std::size_t point_count() const noexcept { return grid->points().size(); }
  [[nodiscard]] std::span<const double> path_values(std::size_t p) const {
    const std::size_t row = point_count() * static_cast<std::size_t>(dim);
    return {values.data() + p * row, row};
  }
  [[nodiscard]] std::span<double> path_values_mut(std::size_t p) {
    const std::size_t row = point_count() * static_cast<std::size_t>(dim);
    return {values.data() + p * row, row};
  }
  [[nodiscard]] SamplePath extract(std::size_t p) const;
};

/// Samples `count` Brownian paths: increments independent N(0, dt_k) per
/// coordinate, generated from the (seed, path index) substream so path p
/// is the same regardless of batch size or thread count.
PathEnsemble sample_brownian(GridPtr grid, int dim, std::uint64_t seed, std::size_t count);

/// Single path from the same substream family (path index selectable).
SamplePath sample_brownian_path(GridPtr grid, int dim, std::uint64_t seed,
                                std::uint64_t path_index = 0);

}  // namespace wienerlab
