#include "wienerlab/girsanov.hpp"

#include <cmath>
#include <stdexcept>

#include "wienerlab/parallel.hpp"

namespace wienerlab {

double ito_sum(const CameronMartinPath& integrand, const SamplePath& path) {
  if (!integrand.grid->same_points_as(*path.grid) || integrand.dim != path.dim) {
    throw std::invalid_argument("ito_sum: grid or dim mismatch");
  }
  const std::size_t n = path.grid->steps();
  const std::size_t d = static_cast<std::size_t>(path.dim);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      acc += integrand.step_derivatives[k * d + c] * path.increments[k * d + c];
    }
  }
  return acc;
}

double girsanov_log_weight(std::span<const double> path_values,
                           std::span<const double> drift_derivatives, const TimeGrid& grid,
                           int sign) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("girsanov_log_weight: sign must be +-1");
  }
  const std::size_t n = grid.steps();
  double ito = 0.0;
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = drift_derivatives[k];
    if (!std::isfinite(u)) {
      throw std::runtime_error("girsanov_log_weight: non-finite drift value");
    }
    ito += u * (path_values[k + 1] - path_values[k]);
    energy += u * u * grid.dt(k);
  }
  return static_cast<double>(sign) * ito - 0.5 * energy;
}

GirsanovWeight girsanov_weight(const DriftSpec& spec, const SamplePath& path, int sign) {
  if (path.dim != 1) throw std::invalid_argument("girsanov_weight: catalog drifts are 1-d");
  DriftEvaluator ev(spec, path.grid);
  std::vector<double> derivs(path.grid->steps());
  ev.eval_all(path.values, derivs);
  GirsanovWeight w;
  w.log_weight = girsanov_log_weight(path.values, derivs, *path.grid, sign);
  w.weight = std::exp(w.log_weight);
  return w;
}

std::vector<GirsanovWeight> girsanov_weights(const DriftSpec& spec, const PathEnsemble& ensemble,
                                             int sign) {
  if (ensemble.dim != 1) throw std::invalid_argument("girsanov_weights: catalog drifts are 1-d");
  DriftEvaluator ev(spec, ensemble.grid);
  const std::size_t n = ensemble.grid->steps();
  std::vector<GirsanovWeight> out(ensemble.count);
  parallel_for_chunked(0, ensemble.count, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> derivs(n);
    for (std::size_t p = lo; p < hi; ++p) {
      const auto row = ensemble.path_values(p);
      ev.eval_all(row, derivs);
      out[p].log_weight = girsanov_log_weight(row, derivs, *ensemble.grid, sign);
      out[p].weight = std::exp(out[p].log_weight);
    }
  });
  return out;
}

McEstimate check_normalization(const DriftSpec& spec, GridPtr grid, std::size_t count,
                               std::uint64_t seed) {
  if (count < 2) throw std::invalid_argument("check_normalization: count must be >= 2");
  const PathEnsemble ensemble = sample_brownian(std::move(grid), 1, seed, count);
  const auto weights = girsanov_weights(spec, ensemble, -1);
  std::vector<double> w(weights.size());
  for (std::size_t p = 0; p < weights.size(); ++p) w[p] = weights[p].weight;
  return mc_from_samples(w);
}

}  // namespace wienerlab
