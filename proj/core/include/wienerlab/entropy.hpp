#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wienerlab/drift.hpp"
#include "wienerlab/filtering.hpp"
#include "wienerlab/mc_estimate.hpp"
#include "wienerlab/sample_path.hpp"
#include "wienerlab/tree_model.hpp"

#include <json.hpp>

namespace wienerlab {

enum class Verdict { InvertibleConsistent, NonInvertible, Inconclusive };
[[nodiscard]] std::string to_string(Verdict v);

/// Filtered-energy estimate with its doubled-k bias probe.
struct EntropyFilterResult {
  McEstimate estimate;     // 1/2 E sum |xi_dot|^2 dt, k neighbors
  McEstimate estimate_2k;  // same with 2k neighbors
  double bias_margin = 0.0;  // |mean_k - mean_2k|
  EstimatorTag tag = EstimatorTag::Particle;
  std::size_t k_neighbors = 0;
  std::size_t queries = 0;
};

struct SolverSummary {
  std::size_t paths = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double max_left_composition = 0.0;
  double max_right_composition = 0.0;
  bool all_converged = true;
};

/// Energy/entropy/gap diagnostic for one drift on one grid.
struct DiagnosticReport {
  std::string drift;
  std::string grid_summary;
  std::size_t grid_steps = 0;
  std::size_t n_paths = 0;  // ensemble size (MC) or tree path count
  std::uint64_t seed = 0;
  std::string estimator;  // "particle" or "tree-exact"
  std::size_t k_neighbors = 0;
  std::size_t query_count = 0;

  McEstimate energy;          // over the paired query set
  McEstimate entropy_filter;  // k-neighbor route
  McEstimate entropy_filter_2k;
  std::optional<McEstimate> entropy_inverse;  // closed-form family only
  McEstimate gap;  // paired per-path energy - filtered energy
  double bias_margin = 0.0;
  Verdict verdict = Verdict::Inconclusive;

  SolverSummary solver;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

/// 1/2 E[sum_k |u_dot_k|^2 dt_k] over `count` sampled Brownian paths.
[[nodiscard]] McEstimate kinetic_energy(const DriftSpec& spec, GridPtr grid, std::size_t count,
                                        std::uint64_t seed);

/// Filtered-energy route to the relative entropy (particle estimator).
[[nodiscard]] EntropyFilterResult entropy_via_filter(const DriftSpec& spec, GridPtr grid,
                                                     std::size_t count, std::uint64_t seed,
                                                     const ParticleFilterConfig& config = {});

/// Tree-exact filtered energy (stderr 0).
[[nodiscard]] EntropyFilterResult entropy_via_filter(const DriftSpec& spec,
                                                     const TreeModel& model,
                                                     double eps_group = 1e-9);

/// Known-inverse route: 1/2 E[|v o U(w)|_H^2] with v from analytic_inverse
/// applied to U(w). Closed-form family only.
[[nodiscard]] McEstimate entropy_via_inverse(const DriftSpec& spec, GridPtr grid,
                                             std::size_t count, std::uint64_t seed);

/// Full MC diagnostic with the paired gap statistic (common random
/// numbers: the same query paths feed energy and filtered energy).
[[nodiscard]] DiagnosticReport invertibility_gap(const DriftSpec& spec, GridPtr grid,
                                                 std::size_t count, std::uint64_t seed,
                                                 const ParticleFilterConfig& config = {});

/// Exact tree-oracle diagnostic (no MC noise; bias margin 0).
[[nodiscard]] DiagnosticReport invertibility_gap(const DriftSpec& spec, const TreeModel& model,
                                                 double eps_group = 1e-9);

/// One report per grid, coarse to fine.
[[nodiscard]] std::vector<DiagnosticReport> refinement_study(
    const DriftSpec& spec, const std::vector<GridPtr>& grids, std::size_t count,
    std::uint64_t seed, const ParticleFilterConfig& config = {});

/// Innovation-increment moment tests fed by the particle filter.
[[nodiscard]] InnovationStats innovation_study(const DriftSpec& spec, GridPtr grid,
                                               std::size_t count, std::uint64_t seed,
                                               const ParticleFilterConfig& config = {},
                                               double z_threshold = 4.0);

/// True when analytic_inverse supports the variant.
[[nodiscard]] bool has_analytic_inverse(const DriftSpec& spec);

}  // namespace wienerlab
