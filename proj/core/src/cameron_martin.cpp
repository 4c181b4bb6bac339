#include "wienerlab/cameron_martin.hpp"

#include <stdexcept>

namespace wienerlab {

CameronMartinPath cm_from_derivatives(GridPtr grid, std::vector<double> step_derivatives,
                                      int dim) {
  if (dim < 1) throw std::invalid_argument("CameronMartinPath: dim must be >= 1");
  const std::size_t n = grid->steps();
  const std::size_t d = static_cast<std::size_t>(dim);
  if (step_derivatives.size() != n * d) {
    throw std::invalid_argument("cm_from_derivatives: size mismatch with grid");
  }
  CameronMartinPath h;
  h.dim = dim;
  h.values.assign((n + 1) * d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = grid->dt(k);
    for (std::size_t c = 0; c < d; ++c) {
      h.values[(k + 1) * d + c] = h.values[k * d + c] + step_derivatives[k * d + c] * dt;
    }
  }
  h.grid = std::move(grid);
  h.step_derivatives = std::move(step_derivatives);
  return h;
}

double cm_norm_sq(const CameronMartinPath& h) {
  const std::size_t n = h.grid->steps();
  const std::size_t d = static_cast<std::size_t>(h.dim);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = h.step_derivatives[k * d + c];
      s += v * v;
    }
    acc += s * h.grid->dt(k);
  }
  return acc;
}

double cm_inner(const CameronMartinPath& h, const CameronMartinPath& g) {
  if (!h.grid->same_points_as(*g.grid) || h.dim != g.dim) {
    throw std::invalid_argument("cm_inner: grid or dim mismatch");
  }
  const std::size_t n = h.grid->steps();
  const std::size_t d = static_cast<std::size_t>(h.dim);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      s += h.step_derivatives[k * d + c] * g.step_derivatives[k * d + c];
    }
    acc += s * h.grid->dt(k);
  }
  return acc;
}

double cm_norm_sq(std::span<const double> step_derivatives, const TimeGrid& grid) {
  if (step_derivatives.size() != grid.steps()) {
    throw std::invalid_argument("cm_norm_sq: size mismatch with grid");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    acc += step_derivatives[k] * step_derivatives[k] * grid.dt(k);
  }
  return acc;
}

}  // namespace wienerlab
