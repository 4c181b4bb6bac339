#include "wienerlab/sample_path.hpp"

#include <cmath>
#include <stdexcept>

#include "wienerlab/parallel.hpp"
#include "wienerlab/rng.hpp"

namespace wienerlab {

namespace {

void check_dim(int dim) {
  if (dim < 1) throw std::invalid_argument("SamplePath: dim must be >= 1");
}

}  // namespace

SamplePath path_from_values(GridPtr grid, std::vector<double> values, int dim) {
  check_dim(dim);
  const std::size_t n = grid->steps();
  const std::size_t d = static_cast<std::size_t>(dim);
  if (values.size() != (n + 1) * d) {
    throw std::invalid_argument("path_from_values: size mismatch with grid");
  }
  for (std::size_t c = 0; c < d; ++c) {
    if (values[c] != 0.0) throw std::invalid_argument("path_from_values: W(0) must be 0");
  }
  SamplePath p;
  p.grid = std::move(grid);
  p.dim = dim;
  p.increments.resize(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      p.increments[k * d + c] = values[(k + 1) * d + c] - values[k * d + c];
    }
  }
  p.values = std::move(values);
  return p;
}

SamplePath path_from_increments(GridPtr grid, std::vector<double> increments, int dim) {
  check_dim(dim);
  const std::size_t n = grid->steps();
  const std::size_t d = static_cast<std::size_t>(dim);
  if (increments.size() != n * d) {
    throw std::invalid_argument("path_from_increments: size mismatch with grid");
  }
  SamplePath p;
  p.grid = std::move(grid);
  p.dim = dim;
  p.values.assign((n + 1) * d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      p.values[(k + 1) * d + c] = p.values[k * d + c] + increments[k * d + c];
    }
  }
  p.increments = std::move(increments);
  return p;
}

SamplePath PathEnsemble::extract(std::size_t p) const {
  const auto row = path_values(p);
  return path_from_values(grid, {row.begin(), row.end()}, dim);
}

namespace {

void fill_brownian_row(std::span<double> row, const TimeGrid& grid, int dim,
                       std::uint64_t seed, std::uint64_t path_index) {
  const std::size_t n = grid.steps();
  const std::size_t d = static_cast<std::size_t>(dim);
  PathRng rng(seed, path_index);
  for (std::size_t c = 0; c < d; ++c) row[c] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double sdt = std::sqrt(grid.dt(k));
    for (std::size_t c = 0; c < d; ++c) {
      row[(k + 1) * d + c] = row[k * d + c] + sdt * rng.next_gaussian();
    }
  }
}

}  // namespace

PathEnsemble sample_brownian(GridPtr grid, int dim, std::uint64_t seed, std::size_t count) {
  check_dim(dim);
  if (count < 1) throw std::invalid_argument("sample_brownian: count must be >= 1");
  PathEnsemble e;
  e.grid = grid;
  e.dim = dim;
  e.count = count;
  e.seed = seed;
  e.values.resize(count * (grid->steps() + 1) * static_cast<std::size_t>(dim));
  parallel_for(0, count, [&](std::size_t p) {
    fill_brownian_row(e.path_values_mut(p), *grid, dim, seed, p);
  });
  return e;
}

SamplePath sample_brownian_path(GridPtr grid, int dim, std::uint64_t seed,
                                std::uint64_t path_index) {
  check_dim(dim);
  std::vector<double> values((grid->steps() + 1) * static_cast<std::size_t>(dim));
  fill_brownian_row(values, *grid, dim, seed, path_index);
  return path_from_values(std::move(grid), std::move(values), dim);
}

}  // namespace wienerlab
