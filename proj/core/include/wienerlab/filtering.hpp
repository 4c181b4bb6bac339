#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wienerlab/drift.hpp"
#include "wienerlab/sample_path.hpp"
#include "wienerlab/tree_model.hpp"

namespace wienerlab {

enum class EstimatorTag { TreeExact, Particle };

/// Per-step estimates xi_dot_k of E[u_dot_k | U-history up to t_k] for one
/// path.
struct FilteredDrift {
  GridPtr grid;
  std::vector<double> values;  // n
  EstimatorTag tag = EstimatorTag::Particle;
};

/// Batch of filtered drifts, path-major rows of length n.
struct FilteredEnsemble {
  GridPtr grid;
  std::size_t count = 0;
  std::vector<double> values;
  EstimatorTag tag = EstimatorTag::Particle;

  [[nodiscard]] std::span<const double> row(std::size_t p) const {
    return {values.data() + p * grid->steps(), grid->steps()};
  }
};

// ---------------------------------------------------------------------------
// Exact tree oracle
// ---------------------------------------------------------------------------

struct TreeFilterResult {
  TreePaths tree;              // enumerated input paths + weights
  PathEnsemble transformed;    // U(w) per tree path
  std::vector<double> drift;   // u_dot, count x n (path-major)
  FilteredEnsemble filtered;   // exact conditional means per atom
};

/// Groups tree paths by their transformed history (U values at t_0..t_k,
/// quantized at eps_group) and replaces the drift by its probability-
/// weighted atom mean. Exact under the tree measure.
TreeFilterResult tree_conditional_drift(const DriftSpec& spec, const TreeModel& model,
                                        double eps_group = 1e-9,
                                        std::size_t cap = kDefaultTreeCap);

// ---------------------------------------------------------------------------
// Particle (k-nearest-neighbor) estimator
// ---------------------------------------------------------------------------

struct ParticleFilterConfig {
  /// 0 means ceil(sqrt(#references)).
  std::size_t k_neighbors = 0;
  /// Also compute the 2k estimate (bias probe) in the same scan.
  bool with_doubled_k = true;
  /// Use only the first `ref_subsample` ensemble paths as neighbors
  /// (0 = all). Queries are always matched against this pool.
  std::size_t ref_subsample = 0;
  /// Evaluate only the first `query_count` paths (0 = all).
  std::size_t query_count = 0;
};

/// Transformed ensemble in step-major layout plus the per-step drifts of
/// every path; the layout the scan wants (contiguous per step).
struct TransformedEnsemble {
  GridPtr grid;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> u_point_major;    // (n+1) x count: U value of path p at point j
  std::vector<double> drift_step_major;  // n x count: u_dot of path p at step k

  [[nodiscard]] double u_value(std::size_t point, std::size_t p) const {
    return u_point_major[point * count + p];
  }
  [[nodiscard]] double drift_value(std::size_t step, std::size_t p) const {
    return drift_step_major[step * count + p];
  }
};

/// Applies U = I + u to the ensemble and lays the results out step-major.
TransformedEnsemble build_transformed(const DriftSpec& spec, const PathEnsemble& ensemble);

/// Resolved scan geometry for a config (defaults filled in).
struct ParticleScanInfo {
  std::size_t refs = 0;
  std::size_t queries = 0;
  std::size_t k_neighbors = 0;
  std::size_t k_doubled = 0;
};
[[nodiscard]] ParticleScanInfo particle_scan_info(const TransformedEnsemble& ensemble,
                                                  const ParticleFilterConfig& config);

/// Streaming k-NN scan. For each query path q (a row of `ensemble`), the
/// k nearest reference paths by Euclidean distance on the transformed
/// history (U values at t_0..t_k) are averaged; ties with the k-th
/// distance are included, so an exactly replicated ensemble reproduces
/// atom means. Optional per-reference weights make the average match a
/// weighted tree.
///
/// sink(ordinal, xi_k, xi_2k) is called once per query in ordinal order
/// within fixed-size chunks; xi_2k is empty unless with_doubled_k.
void particle_filter_scan(
    const TransformedEnsemble& ensemble, const ParticleFilterConfig& config,
    const std::function<void(std::size_t, std::span<const double>, std::span<const double>)>&
        sink,
    std::span<const double> ref_weights = {});

/// Materialized variant (small ensembles / tests): k-NN estimates for the
/// first query_count paths.
FilteredEnsemble particle_filtered_drift(const DriftSpec& spec, const PathEnsemble& ensemble,
                                         const ParticleFilterConfig& config,
                                         std::span<const double> ref_weights = {});

// ---------------------------------------------------------------------------
// Innovations
// ---------------------------------------------------------------------------

/// Z(t_k) = U(t_k) - sum_{j<k} xi_dot_j dt_j.
struct InnovationPath {
  GridPtr grid;
  std::vector<double> values;  // n+1, Z(0) = 0
};

InnovationPath innovation_path(const SamplePath& transformed, const FilteredDrift& filtered);

/// exp(-sum_{t_j < t} xi_dot_j dZ_j - 1/2 sum_{t_j < t} xi_dot_j^2 dt_j),
/// the conditional exponential martingale evaluated at grid time t.
double conditional_girsanov(const FilteredDrift& filtered, const InnovationPath& innovation,
                            double t);

/// Per-step moment checks of the Brownian-motion property of innovation
/// increments: mean ~ 0, variance ~ dt_k, lag-1 correlation ~ 0, each with
/// a z-score; a step fails when |z| > threshold (default 4).
struct InnovationStepStats {
  double t_left = 0.0, dt = 0.0;
  double mean = 0.0, se_mean = 0.0;
  double variance = 0.0, se_variance = 0.0;
  double lag1_corr = 0.0, se_corr = 0.0;  // corr with the next step
  double z_mean = 0.0, z_var = 0.0, z_corr = 0.0;
  bool pass = true;
};

struct InnovationStats {
  std::vector<InnovationStepStats> steps;
  std::size_t n_paths = 0;
  double z_threshold = 4.0;
  bool all_pass = true;
};

/// Streaming accumulator over innovation increment rows.
class InnovationMoments {
 public:
  explicit InnovationMoments(std::size_t n_steps);
  void add_increments(std::span<const double> dz);
  void merge(const InnovationMoments& other);
  [[nodiscard]] InnovationStats finalize(const TimeGrid& grid, double z_threshold = 4.0) const;

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  std::vector<double> sum_, sum_sq_, sum_lag_;
};

InnovationStats innovation_bm_test(const std::vector<InnovationPath>& ensemble,
                                   double z_threshold = 4.0);

}  // namespace wienerlab
