#include "wienerlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wienerlab/girsanov.hpp"
#include "wienerlab/io.hpp"
#include "wienerlab/parallel.hpp"
#include "wienerlab/transform.hpp"

namespace wienerlab {

using nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::InvertibleConsistent:
      return "invertible-consistent";
    case Verdict::NonInvertible:
      return "non-invertible";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Verdict per the gap statistic. The round-off floor keeps exact-zero
// gaps (deterministic drifts, tree oracle) from tripping either branch
// on 1e-17-scale float residue.
Verdict classify(const McEstimate& gap, double bias_margin, double energy_scale) {
  const double floor = 1e-12 * std::max(1.0, std::fabs(energy_scale));
  if (std::fabs(gap.mean) <= 3.0 * gap.std_error + floor) {
    return Verdict::InvertibleConsistent;
  }
  if (gap.mean > 5.0 * gap.std_error + bias_margin + floor) {
    return Verdict::NonInvertible;
  }
  return Verdict::Inconclusive;
}

McEstimate exact_estimate(double value, std::size_t n) {
  McEstimate e;
  e.mean = value;
  e.std_error = 0.0;
  e.n_samples = n;
  return e;
}

// 1/2 sum u_dot_k^2 dt_k for one path row of a TransformedEnsemble.
double path_energy(const TransformedEnsemble& te, std::size_t p) {
  const TimeGrid& grid = *te.grid;
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double u = te.drift_value(k, p);
    acc += u * u * grid.dt(k);
  }
  return 0.5 * acc;
}

// 1/2 |v o U|_H^2 for a transformed path given as raw values: v o U =
// V(theta) - theta with V = analytic_inverse(theta).
double inverse_route_energy(const DriftSpec& spec, GridPtr grid,
                            std::vector<double> theta_values) {
  const TimeGrid& g = *grid;
  const SamplePath theta = path_from_values(std::move(grid), std::move(theta_values));
  const SamplePath v = analytic_inverse(spec, theta);
  double acc = 0.0;
  for (std::size_t k = 0; k < g.steps(); ++k) {
    const double dv = v.values[k + 1] - v.values[k];
    const double du = theta.values[k + 1] - theta.values[k];
    const double deriv = (dv - du) / g.dt(k);
    acc += deriv * deriv * g.dt(k);
  }
  return 0.5 * acc;
}

SolverSummary solver_diagnostics(const DriftSpec& spec, GridPtr grid, std::uint64_t seed,
                                 std::size_t count) {
  const std::size_t paths = std::min<std::size_t>(count, 128);
  SolverSummary s;
  s.paths = paths;
  InverseSolveOptions opts;  // sequential-euler defaults
  double residual_sum = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    const SamplePath w = sample_brownian_path(grid, 1, seed, p);
    const InverseSolveResult r = solve_inverse_sde(spec, w, opts);
    residual_sum += r.residual;
    s.max_residual = std::max(s.max_residual, r.residual);
    s.all_converged = s.all_converged && r.converged;
    const auto [left, right] = composition_residual(spec, w, r.candidate, opts);
    s.max_left_composition = std::max(s.max_left_composition, left);
    s.max_right_composition = std::max(s.max_right_composition, right);
  }
  s.mean_residual = paths > 0 ? residual_sum / static_cast<double>(paths) : 0.0;
  return s;
}

}  // namespace

bool has_analytic_inverse(const DriftSpec& spec) {
  return spec.get_if<ZeroDrift>() != nullptr || spec.get_if<ConstantShift>() != nullptr ||
         spec.get_if<LinearFeedback>() != nullptr;
}

McEstimate kinetic_energy(const DriftSpec& spec, GridPtr grid, std::size_t count,
                          std::uint64_t seed) {
  const PathEnsemble ensemble = sample_brownian(std::move(grid), 1, seed, count);
  DriftEvaluator ev(spec, ensemble.grid);
  const TimeGrid& g = *ensemble.grid;
  const std::size_t n = g.steps();
  std::vector<double> samples(count);
  parallel_for_chunked(0, count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const auto row = ensemble.path_values(p);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double u = ev.eval(row, k);
        acc += u * u * g.dt(k);
      }
      samples[p] = 0.5 * acc;
    }
  });
  return mc_from_samples(samples);
}

McEstimate entropy_via_inverse(const DriftSpec& spec, GridPtr grid, std::size_t count,
                               std::uint64_t seed) {
  if (!has_analytic_inverse(spec)) {
    throw std::invalid_argument("entropy_via_inverse: unsupported drift variant \"" +
                                spec.name() + '"');
  }
  const PathEnsemble ensemble = sample_brownian(grid, 1, seed, count);
  const PathEnsemble transformed = apply_U(spec, ensemble);
  std::vector<double> samples(count);
  parallel_for_chunked(0, count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const auto row = transformed.path_values(p);
      samples[p] = inverse_route_energy(spec, grid, {row.begin(), row.end()});
    }
  });
  return mc_from_samples(samples);
}

namespace {

struct FilterScanOutput {
  std::vector<double> energy;      // per query: 1/2 sum u_dot^2 dt
  std::vector<double> filtered_k;  // per query: 1/2 sum xi_k^2 dt
  std::vector<double> filtered_2k;
  std::vector<double> gap;  // energy - filtered_k, paired
};

FilterScanOutput run_filter_scan(const TransformedEnsemble& te,
                                 const ParticleFilterConfig& config) {
  const TimeGrid& grid = *te.grid;
  const std::size_t n = grid.steps();
  const std::size_t queries =
      config.query_count == 0 ? te.count : std::min(config.query_count, te.count);

  FilterScanOutput out;
  out.energy.resize(queries);
  out.filtered_k.resize(queries);
  out.filtered_2k.resize(queries);
  out.gap.resize(queries);

  particle_filter_scan(te, config,
                       [&](std::size_t q, std::span<const double> xi_k,
                           std::span<const double> xi_2k) {
                         double ek = 0.0, e2k = 0.0;
                         for (std::size_t k = 0; k < n; ++k) {
                           ek += xi_k[k] * xi_k[k] * grid.dt(k);
                           if (!xi_2k.empty()) e2k += xi_2k[k] * xi_2k[k] * grid.dt(k);
                         }
                         out.energy[q] = path_energy(te, q);
                         out.filtered_k[q] = 0.5 * ek;
                         out.filtered_2k[q] = xi_2k.empty() ? 0.5 * ek : 0.5 * e2k;
                         out.gap[q] = out.energy[q] - out.filtered_k[q];
                       });
  return out;
}

}  // namespace

EntropyFilterResult entropy_via_filter(const DriftSpec& spec, GridPtr grid, std::size_t count,
                                       std::uint64_t seed, const ParticleFilterConfig& config) {
  PathEnsemble ensemble = sample_brownian(std::move(grid), 1, seed, count);
  const TransformedEnsemble te = build_transformed(spec, ensemble);
  ensemble.values.clear();
  ensemble.values.shrink_to_fit();

  ParticleFilterConfig cfg = config;
  cfg.with_doubled_k = true;
  const FilterScanOutput scan = run_filter_scan(te, cfg);
  const ParticleScanInfo info = particle_scan_info(te, cfg);

  EntropyFilterResult r;
  r.estimate = mc_from_samples(scan.filtered_k);
  r.estimate_2k = mc_from_samples(scan.filtered_2k);
  r.bias_margin = std::fabs(r.estimate.mean - r.estimate_2k.mean);
  r.tag = EstimatorTag::Particle;
  r.k_neighbors = info.k_neighbors;
  r.queries = info.queries;
  return r;
}

EntropyFilterResult entropy_via_filter(const DriftSpec& spec, const TreeModel& model,
                                       double eps_group) {
  const TreeFilterResult tf = tree_conditional_drift(spec, model, eps_group);
  const TimeGrid& grid = *model.grid();
  const std::size_t n = grid.steps();
  double acc = 0.0;
  for (std::size_t p = 0; p < tf.tree.paths.count; ++p) {
    double e = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = tf.filtered.values[p * n + k];
      e += xi * xi * grid.dt(k);
    }
    acc += tf.tree.weights[p] * 0.5 * e;
  }
  EntropyFilterResult r;
  r.estimate = exact_estimate(acc, tf.tree.paths.count);
  r.estimate_2k = r.estimate;
  r.bias_margin = 0.0;
  r.tag = EstimatorTag::TreeExact;
  r.queries = tf.tree.paths.count;
  return r;
}

DiagnosticReport invertibility_gap(const DriftSpec& spec, GridPtr grid, std::size_t count,
                                   std::uint64_t seed, const ParticleFilterConfig& config) {
  PathEnsemble ensemble = sample_brownian(grid, 1, seed, count);
  const TransformedEnsemble te = build_transformed(spec, ensemble);
  ensemble.values.clear();
  ensemble.values.shrink_to_fit();

  ParticleFilterConfig cfg = config;
  cfg.with_doubled_k = true;
  const FilterScanOutput scan = run_filter_scan(te, cfg);
  const ParticleScanInfo info = particle_scan_info(te, cfg);
  const std::size_t queries = scan.energy.size();

  DiagnosticReport rep;
  rep.drift = spec.describe();
  rep.grid_summary = grid->summary();
  rep.grid_steps = grid->steps();
  rep.n_paths = count;
  rep.seed = seed;
  rep.estimator = "particle";
  rep.k_neighbors = info.k_neighbors;
  rep.query_count = queries;
  rep.energy = mc_from_samples(scan.energy);
  rep.entropy_filter = mc_from_samples(scan.filtered_k);
  rep.entropy_filter_2k = mc_from_samples(scan.filtered_2k);
  rep.gap = mc_from_samples(scan.gap);
  rep.bias_margin = std::fabs(rep.entropy_filter.mean - rep.entropy_filter_2k.mean);
  rep.verdict = classify(rep.gap, rep.bias_margin, rep.energy.mean);

  if (has_analytic_inverse(spec)) {
    std::vector<double> samples(queries);
    parallel_for_chunked(0, queries, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> theta(te.grid->points().size());
      for (std::size_t q = lo; q < hi; ++q) {
        for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = te.u_value(j, q);
        samples[q] = inverse_route_energy(spec, grid, theta);
      }
    });
    rep.entropy_inverse = mc_from_samples(samples);
  }

  rep.solver = solver_diagnostics(spec, grid, seed, count);
  return rep;
}

DiagnosticReport invertibility_gap(const DriftSpec& spec, const TreeModel& model,
                                   double eps_group) {
  const TreeFilterResult tf = tree_conditional_drift(spec, model, eps_group);
  const TimeGrid& grid = *model.grid();
  const std::size_t n = grid.steps();
  const std::size_t count = tf.tree.paths.count;

  double energy = 0.0, filtered = 0.0, gap = 0.0, inverse_route = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    double eu = 0.0, ef = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double u = tf.drift[p * n + k];
      const double xi = tf.filtered.values[p * n + k];
      eu += u * u * grid.dt(k);
      ef += xi * xi * grid.dt(k);
    }
    energy += tf.tree.weights[p] * 0.5 * eu;
    filtered += tf.tree.weights[p] * 0.5 * ef;
    gap += tf.tree.weights[p] * 0.5 * (eu - ef);
  }

  DiagnosticReport rep;
  rep.drift = spec.describe();
  rep.grid_summary = grid.summary();
  rep.grid_steps = n;
  rep.n_paths = count;
  rep.estimator = "tree-exact";
  rep.query_count = count;
  rep.energy = exact_estimate(energy, count);
  rep.entropy_filter = exact_estimate(filtered, count);
  rep.entropy_filter_2k = rep.entropy_filter;
  rep.gap = exact_estimate(gap, count);
  rep.bias_margin = 0.0;
  rep.verdict = classify(rep.gap, rep.bias_margin, rep.energy.mean);

  if (has_analytic_inverse(spec)) {
    for (std::size_t p = 0; p < count; ++p) {
      const auto row = tf.transformed.path_values(p);
      inverse_route +=
          tf.tree.weights[p] * inverse_route_energy(spec, model.grid(), {row.begin(), row.end()});
    }
    rep.entropy_inverse = exact_estimate(inverse_route, count);
  }
  return rep;
}

std::vector<DiagnosticReport> refinement_study(const DriftSpec& spec,
                                               const std::vector<GridPtr>& grids,
                                               std::size_t count, std::uint64_t seed,
                                               const ParticleFilterConfig& config) {
  if (grids.empty()) throw std::invalid_argument("refinement_study: no grids");
  for (std::size_t i = 1; i < grids.size(); ++i) {
    if (grids[i]->steps() <= grids[i - 1]->steps()) {
      throw std::invalid_argument("refinement_study: grids must be ordered by refinement");
    }
  }
  std::vector<DiagnosticReport> reports;
  reports.reserve(grids.size());
  for (const auto& grid : grids) {
    reports.push_back(invertibility_gap(spec, grid, count, seed, config));
  }
  return reports;
}

InnovationStats innovation_study(const DriftSpec& spec, GridPtr grid, std::size_t count,
                                 std::uint64_t seed, const ParticleFilterConfig& config,
                                 double z_threshold) {
  PathEnsemble ensemble = sample_brownian(std::move(grid), 1, seed, count);
  const TransformedEnsemble te = build_transformed(spec, ensemble);
  ensemble.values.clear();
  ensemble.values.shrink_to_fit();
  const TimeGrid& g = *te.grid;
  const std::size_t n = g.steps();

  ParticleFilterConfig cfg = config;
  cfg.with_doubled_k = false;
  const std::size_t queries =
      cfg.query_count == 0 ? te.count : std::min(cfg.query_count, te.count);

  // Chunk-slot accumulators merged in index order: totals independent of
  // the worker interleaving (the scan hands out fixed 256-query chunks).
  constexpr std::size_t kChunk = 256;
  const std::size_t n_chunks = (queries + kChunk - 1) / kChunk;
  std::vector<InnovationMoments> chunk_moments(n_chunks, InnovationMoments(n));

  particle_filter_scan(te, cfg,
                       [&](std::size_t q, std::span<const double> xi,
                           std::span<const double>) {
                         std::vector<double> dz(n);
                         for (std::size_t k = 0; k < n; ++k) {
                           const double du = te.u_value(k + 1, q) - te.u_value(k, q);
                           dz[k] = du - xi[k] * g.dt(k);
                         }
                         chunk_moments[q / kChunk].add_increments(dz);
                       });

  InnovationMoments total(n);
  for (const auto& m : chunk_moments) total.merge(m);
  return total.finalize(g, z_threshold);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json estimate_json(const McEstimate& e) {
  return json{{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}};
}

}  // namespace

json DiagnosticReport::to_json() const {
  json j{{"drift", drift},
         {"grid", grid_summary},
         {"grid_steps", grid_steps},
         {"n_paths", n_paths},
         {"seed", seed},
         {"estimator", estimator},
         {"k_neighbors", k_neighbors},
         {"query_count", query_count},
         {"energy", estimate_json(energy)},
         {"entropy_filter", estimate_json(entropy_filter)},
         {"entropy_filter_2k", estimate_json(entropy_filter_2k)},
         {"gap", estimate_json(gap)},
         {"bias_margin", bias_margin},
         {"verdict", to_string(verdict)},
         {"solver",
          json{{"paths", solver.paths},
               {"max_residual", solver.max_residual},
               {"mean_residual", solver.mean_residual},
               {"max_left_composition", solver.max_left_composition},
               {"max_right_composition", solver.max_right_composition},
               {"all_converged", solver.all_converged}}}};
  if (entropy_inverse) j["entropy_inverse"] = estimate_json(*entropy_inverse);
  return j;
}

std::string DiagnosticReport::csv_header() {
  return "drift,grid,n_steps,n_paths,seed,estimator,energy,energy_se,entropy_filter,"
         "entropy_filter_se,entropy_filter_2k,entropy_inverse,entropy_inverse_se,gap,gap_se,"
         "bias_margin,verdict,solver_max_residual,comp_left_max,comp_right_max";
}

std::string DiagnosticReport::csv_row() const {
  std::ostringstream os;
  CsvWriter csv(os);
  csv.field(drift)
      .field(grid_summary)
      .field(static_cast<std::uint64_t>(grid_steps))
      .field(static_cast<std::uint64_t>(n_paths))
      .field(static_cast<std::uint64_t>(seed))
      .field(estimator)
      .field(energy.mean)
      .field(energy.std_error)
      .field(entropy_filter.mean)
      .field(entropy_filter.std_error)
      .field(entropy_filter_2k.mean)
      .field(entropy_inverse ? format_double(entropy_inverse->mean) : std::string())
      .field(entropy_inverse ? format_double(entropy_inverse->std_error) : std::string())
      .field(gap.mean)
      .field(gap.std_error)
      .field(bias_margin)
      .field(to_string(verdict))
      .field(solver.max_residual)
      .field(solver.max_left_composition)
      .field(solver.max_right_composition);
  const std::string row = os.str();
  return row;
}

}  // namespace wienerlab
