#pragma once

#include <cstdint>
#include <vector>

#include "wienerlab/cameron_martin.hpp"
#include "wienerlab/drift.hpp"
#include "wienerlab/mc_estimate.hpp"
#include "wienerlab/sample_path.hpp"

namespace wienerlab {

/// Exponential weight exp(sign * sum u_dot_k dW_k - 1/2 sum u_dot_k^2 dt_k).
/// Stored in log space: block drifts on fine grids swing the weight over
/// many orders of magnitude.
struct GirsanovWeight {
  double log_weight = 0.0;
  double weight = 1.0;
};

/// Left-point stochastic sum: sum_k h_dot_k . dW_k. Grids must match.
[[nodiscard]] double ito_sum(const CameronMartinPath& integrand, const SamplePath& path);

/// Weight of the drift evaluated predictably on `path`, with sign +1 or -1
/// on the stochastic term.
[[nodiscard]] GirsanovWeight girsanov_weight(const DriftSpec& spec, const SamplePath& path,
                                             int sign);

/// Raw-buffer core shared by the batch estimators: values/derivatives are
/// one path's rows on `grid`.
[[nodiscard]] double girsanov_log_weight(std::span<const double> path_values,
                                         std::span<const double> drift_derivatives,
                                         const TimeGrid& grid, int sign);

/// Monte Carlo check of E[rho(-u)] = 1: mean and stderr of the weight over
/// `count` sampled paths.
[[nodiscard]] McEstimate check_normalization(const DriftSpec& spec, GridPtr grid,
                                             std::size_t count, std::uint64_t seed);

/// Per-path weights for an ensemble (sign applied to the stochastic term).
[[nodiscard]] std::vector<GirsanovWeight> girsanov_weights(const DriftSpec& spec,
                                                           const PathEnsemble& ensemble,
                                                           int sign);

}  // namespace wienerlab
