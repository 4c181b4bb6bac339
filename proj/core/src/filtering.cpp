#include "wienerlab/filtering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "wienerlab/parallel.hpp"

namespace wienerlab {

// ---------------------------------------------------------------------------
// Exact tree oracle
// ---------------------------------------------------------------------------

TreeFilterResult tree_conditional_drift(const DriftSpec& spec, const TreeModel& model,
                                        double eps_group, std::size_t cap) {
  if (!(eps_group > 0.0)) {
    throw std::invalid_argument("tree_conditional_drift: eps_group must be > 0");
  }
  TreeFilterResult result;
  result.tree = enumerate_tree(model, cap);
  const TreePaths& tree = result.tree;
  const std::size_t count = tree.paths.count;
  const std::size_t n = model.steps();
  const TimeGrid& grid = *model.grid();

  DriftEvaluator ev(spec, model.grid());
  result.drift.resize(count * n);
  result.transformed = tree.paths;
  parallel_for_chunked(0, count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const auto in = tree.paths.path_values(p);
      auto out = result.transformed.path_values_mut(p);
      double* u_row = result.drift.data() + p * n;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        u_row[k] = ev.eval(in, k);
        acc += u_row[k] * grid.dt(k);
        out[k + 1] = in[k + 1] + acc;
      }
    }
  });

  // Hierarchical atom refinement: the group of a path at step k is its
  // group at k-1 split by the quantized value U(t_k).
  result.filtered.grid = model.grid();
  result.filtered.count = count;
  result.filtered.tag = EstimatorTag::TreeExact;
  result.filtered.values.resize(count * n);

  std::vector<std::uint32_t> group(count, 0);
  std::vector<std::uint32_t> next_group(count);
  std::vector<double> group_weight;
  std::vector<double> group_drift_sum;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;

  const double inv_eps = 1.0 / eps_group;
  std::uint32_t n_groups = 1;
  for (std::size_t k = 0; k < n; ++k) {
    // Refine by U(t_k). (t_0 = 0 for every path, so step 0 keeps one atom:
    // the step-0 conditional is the unconditional mean.)
    ids.clear();
    ids.reserve(2 * n_groups);
    std::uint32_t fresh = 0;
    for (std::size_t p = 0; p < count; ++p) {
      const double u_val = result.transformed.values[p * (n + 1) + k];
      const auto q = static_cast<std::int64_t>(std::llround(u_val * inv_eps));
      // Pack (old group, quantized value) into one key; the mix keeps
      // distinct pairs distinct with overwhelming margin for our sizes.
      const std::uint64_t key =
          (static_cast<std::uint64_t>(group[p]) * 0x9E3779B97F4A7C15ull) ^
          static_cast<std::uint64_t>(q + 0x4000000000000000ll);
      auto [it, inserted] = ids.try_emplace(key, fresh);
      if (inserted) ++fresh;
      next_group[p] = it->second;
    }
    group.swap(next_group);
    n_groups = fresh;

    group_weight.assign(n_groups, 0.0);
    group_drift_sum.assign(n_groups, 0.0);
    for (std::size_t p = 0; p < count; ++p) {
      group_weight[group[p]] += tree.weights[p];
      group_drift_sum[group[p]] += tree.weights[p] * result.drift[p * n + k];
    }
    for (std::size_t p = 0; p < count; ++p) {
      result.filtered.values[p * n + k] = group_drift_sum[group[p]] / group_weight[group[p]];
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Particle estimator
// ---------------------------------------------------------------------------

TransformedEnsemble build_transformed(const DriftSpec& spec, const PathEnsemble& ensemble) {
  if (ensemble.dim != 1) throw std::invalid_argument("build_transformed: dim must be 1");
  DriftEvaluator ev(spec, ensemble.grid);
  const std::size_t n = ensemble.grid->steps();
  const std::size_t count = ensemble.count;
  const TimeGrid& grid = *ensemble.grid;

  TransformedEnsemble out;
  out.grid = ensemble.grid;
  out.count = count;
  out.seed = ensemble.seed;
  out.u_point_major.resize((n + 1) * count);
  out.drift_step_major.resize(n * count);

  parallel_for_chunked(0, count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const auto in = ensemble.path_values(p);
      double acc = 0.0;
      out.u_point_major[p] = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double u = ev.eval(in, k);
        out.drift_step_major[k * count + p] = u;
        acc += u * grid.dt(k);
        out.u_point_major[(k + 1) * count + p] = in[k + 1] + acc;
      }
    }
  });
  return out;
}

namespace {

struct ScanPlan {
  std::size_t refs = 0;     // reference pool size (first rows)
  std::size_t queries = 0;  // number of query rows evaluated
  std::size_t k1 = 0;       // neighbors for the primary estimate
  std::size_t k2 = 0;       // neighbors for the bias probe (== k1 if unused)
  bool doubled = false;
};

ScanPlan make_plan(const TransformedEnsemble& ensemble, const ParticleFilterConfig& config) {
  ScanPlan plan;
  plan.refs = config.ref_subsample == 0 ? ensemble.count
                                        : std::min(config.ref_subsample, ensemble.count);
  if (plan.refs < 2) throw std::invalid_argument("particle filter: need at least 2 references");
  plan.queries = config.query_count == 0 ? ensemble.count
                                         : std::min(config.query_count, ensemble.count);
  plan.k1 = config.k_neighbors == 0
                ? static_cast<std::size_t>(
                      std::ceil(std::sqrt(static_cast<double>(plan.refs))))
                : config.k_neighbors;
  plan.k1 = std::min(plan.k1, plan.refs);
  plan.doubled = config.with_doubled_k;
  plan.k2 = plan.doubled ? std::min(2 * plan.k1, plan.refs) : plan.k1;
  return plan;
}

}  // namespace

ParticleScanInfo particle_scan_info(const TransformedEnsemble& ensemble,
                                    const ParticleFilterConfig& config) {
  const ScanPlan plan = make_plan(ensemble, config);
  return {plan.refs, plan.queries, plan.k1, plan.k2};
}

void particle_filter_scan(
    const TransformedEnsemble& ensemble, const ParticleFilterConfig& config,
    const std::function<void(std::size_t, std::span<const double>, std::span<const double>)>&
        sink,
    std::span<const double> ref_weights) {
  const ScanPlan plan = make_plan(ensemble, config);
  const std::size_t n = ensemble.grid->steps();
  const std::size_t refs = plan.refs;
  if (!ref_weights.empty() && ref_weights.size() < refs) {
    throw std::invalid_argument("particle_filter_scan: ref_weights shorter than the pool");
  }

  // Step-0 estimate: every history is the single point U(0) = 0, so the
  // conditional mean is the (weighted) pool mean.
  std::vector<double> pool_mean(n, 0.0);
  {
    double wsum = 0.0;
    for (std::size_t r = 0; r < refs; ++r) {
      wsum += ref_weights.empty() ? 1.0 : ref_weights[r];
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double* u_row = ensemble.drift_step_major.data() + k * ensemble.count;
      double s = 0.0;
      for (std::size_t r = 0; r < refs; ++r) {
        s += (ref_weights.empty() ? 1.0 : ref_weights[r]) * u_row[r];
      }
      pool_mean[k] = s / wsum;
    }
  }

  constexpr std::size_t kChunk = 256;
  const std::size_t n_chunks = (plan.queries + kChunk - 1) / kChunk;
  std::atomic<std::size_t> next_chunk{0};

  auto worker = [&]() {
    std::vector<double> d2(refs);
    std::vector<std::uint32_t> cand;
    cand.reserve(refs);
    std::vector<double> scratch;
    std::vector<double> xi1(n), xi2(n);

    for (;;) {
      const std::size_t chunk = next_chunk.fetch_add(1, std::memory_order_relaxed);
      if (chunk >= n_chunks) break;
      const std::size_t q_lo = chunk * kChunk;
      const std::size_t q_hi = std::min(plan.queries, q_lo + kChunk);
      for (std::size_t q = q_lo; q < q_hi; ++q) {
        std::fill(d2.begin(), d2.end(), 0.0);
        double threshold = -1.0;  // <0: full selection pass needed
        for (std::size_t k = 0; k < n; ++k) {
          if (k == 0) {
            xi1[0] = pool_mean[0];
            xi2[0] = pool_mean[0];
            continue;
          }
          // Prefix now includes t_k; fold in the new coordinate and pick
          // up selection candidates under the previous threshold.
          const double* u_row = ensemble.u_point_major.data() + k * ensemble.count;
          const double uq = u_row[q];
          cand.clear();
          if (threshold < 0.0) {
            for (std::size_t r = 0; r < refs; ++r) {
              const double diff = u_row[r] - uq;
              d2[r] += diff * diff;
            }
          } else {
            for (std::size_t r = 0; r < refs; ++r) {
              const double diff = u_row[r] - uq;
              d2[r] += diff * diff;
              if (d2[r] <= threshold) cand.push_back(static_cast<std::uint32_t>(r));
            }
          }
          // Distances only grow with k, so the previous k2-th order
          // statistic is a valid lower bound; escalate until the pool
          // under the threshold is large enough, falling back to a full
          // pass when the threshold is degenerate (all-tied histories).
          while (cand.size() < plan.k2) {
            if (threshold <= 0.0) {
              cand.resize(refs);
              for (std::size_t r = 0; r < refs; ++r) cand[r] = static_cast<std::uint32_t>(r);
              break;
            }
            threshold *= 4.0;
            cand.clear();
            for (std::size_t r = 0; r < refs; ++r) {
              if (d2[r] <= threshold) cand.push_back(static_cast<std::uint32_t>(r));
            }
          }

          scratch.resize(cand.size());
          for (std::size_t i = 0; i < cand.size(); ++i) scratch[i] = d2[cand[i]];
          auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(plan.k2 - 1);
          std::nth_element(scratch.begin(), nth, scratch.end());
          const double q2 = *nth;
          double q1 = q2;
          if (plan.k2 != plan.k1) {
            auto nth1 = scratch.begin() + static_cast<std::ptrdiff_t>(plan.k1 - 1);
            std::nth_element(scratch.begin(), nth1, nth);
            q1 = *nth1;
          }

          // Averages in reference-index order (ties with the cutoff
          // distance included), so results do not depend on how
          // nth_element permuted the scratch buffer.
          const double* du_row = ensemble.drift_step_major.data() + k * ensemble.count;
          double s1 = 0.0, w1 = 0.0, s2 = 0.0, w2 = 0.0;
          for (const std::uint32_t r : cand) {
            if (d2[r] > q2) continue;
            const double w = ref_weights.empty() ? 1.0 : ref_weights[r];
            s2 += w * du_row[r];
            w2 += w;
            if (d2[r] <= q1) {
              s1 += w * du_row[r];
              w1 += w;
            }
          }
          xi1[k] = s1 / w1;
          xi2[k] = s2 / w2;
          threshold = q2 > 0.0 ? q2 * 2.0 : 0.0;
        }
        sink(q, std::span<const double>(xi1.data(), n),
             plan.doubled ? std::span<const double>(xi2.data(), n)
                          : std::span<const double>());
      }
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(max_threads(),
                                      static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
}

FilteredEnsemble particle_filtered_drift(const DriftSpec& spec, const PathEnsemble& ensemble,
                                         const ParticleFilterConfig& config,
                                         std::span<const double> ref_weights) {
  const TransformedEnsemble transformed = build_transformed(spec, ensemble);
  ParticleFilterConfig cfg = config;
  cfg.with_doubled_k = false;
  const std::size_t queries =
      cfg.query_count == 0 ? ensemble.count : std::min(cfg.query_count, ensemble.count);

  FilteredEnsemble out;
  out.grid = ensemble.grid;
  out.count = queries;
  out.tag = EstimatorTag::Particle;
  out.values.resize(queries * ensemble.grid->steps());
  particle_filter_scan(
      transformed, cfg,
      [&](std::size_t q, std::span<const double> xi, std::span<const double>) {
        std::copy(xi.begin(), xi.end(), out.values.begin() + q * xi.size());
      },
      ref_weights);
  return out;
}

// ---------------------------------------------------------------------------
// Innovations
// ---------------------------------------------------------------------------

InnovationPath innovation_path(const SamplePath& transformed, const FilteredDrift& filtered) {
  if (!transformed.grid->same_points_as(*filtered.grid)) {
    throw std::invalid_argument("innovation_path: grid mismatch");
  }
  const std::size_t n = transformed.grid->steps();
  InnovationPath z;
  z.grid = transformed.grid;
  z.values.resize(n + 1);
  z.values[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += filtered.values[k] * transformed.grid->dt(k);
    z.values[k + 1] = transformed.values[k + 1] - acc;
  }
  return z;
}

double conditional_girsanov(const FilteredDrift& filtered, const InnovationPath& innovation,
                            double t) {
  if (!filtered.grid->same_points_as(*innovation.grid)) {
    throw std::invalid_argument("conditional_girsanov: grid mismatch");
  }
  const std::size_t idx = filtered.grid->index_of(t);
  if (idx == TimeGrid::npos) {
    throw std::invalid_argument("conditional_girsanov: t is not a grid point");
  }
  double ito = 0.0, energy = 0.0;
  for (std::size_t j = 0; j < idx; ++j) {
    const double xi = filtered.values[j];
    ito += xi * (innovation.values[j + 1] - innovation.values[j]);
    energy += xi * xi * filtered.grid->dt(j);
  }
  return std::exp(-ito - 0.5 * energy);
}

InnovationMoments::InnovationMoments(std::size_t n_steps)
    : n_(n_steps),
      sum_(n_steps, 0.0),
      sum_sq_(n_steps, 0.0),
      sum_lag_(n_steps > 0 ? n_steps - 1 : 0, 0.0) {}

void InnovationMoments::add_increments(std::span<const double> dz) {
  if (dz.size() != n_) throw std::invalid_argument("InnovationMoments: size mismatch");
  for (std::size_t k = 0; k < n_; ++k) {
    sum_[k] += dz[k];
    sum_sq_[k] += dz[k] * dz[k];
    if (k + 1 < n_) sum_lag_[k] += dz[k] * dz[k + 1];
  }
  ++count_;
}

void InnovationMoments::merge(const InnovationMoments& other) {
  if (other.n_ != n_) throw std::invalid_argument("InnovationMoments: merge size mismatch");
  for (std::size_t k = 0; k < n_; ++k) {
    sum_[k] += other.sum_[k];
    sum_sq_[k] += other.sum_sq_[k];
    if (k + 1 < n_) sum_lag_[k] += other.sum_lag_[k];
  }
  count_ += other.count_;
}

InnovationStats InnovationMoments::finalize(const TimeGrid& grid, double z_threshold) const {
  if (grid.steps() != n_) throw std::invalid_argument("InnovationMoments: grid mismatch");
  if (count_ < 2) throw std::invalid_argument("InnovationMoments: need at least 2 paths");
  const double nn = static_cast<double>(count_);

  InnovationStats stats;
  stats.n_paths = count_;
  stats.z_threshold = z_threshold;
  stats.steps.resize(n_);
  std::vector<double> means(n_), vars(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    means[k] = sum_[k] / nn;
    vars[k] = (sum_sq_[k] - nn * means[k] * means[k]) / (nn - 1.0);
  }
  for (std::size_t k = 0; k < n_; ++k) {
    InnovationStepStats& s = stats.steps[k];
    s.t_left = grid.t(k);
    s.dt = grid.dt(k);
    s.mean = means[k];
    s.variance = vars[k];
    s.se_mean = std::sqrt(vars[k] / nn);
    s.se_variance = vars[k] * std::sqrt(2.0 / (nn - 1.0));
    s.z_mean = s.se_mean > 0.0 ? std::fabs(s.mean) / s.se_mean : 0.0;
    s.z_var = s.se_variance > 0.0 ? std::fabs(s.variance - s.dt) / s.se_variance : 0.0;
    if (k + 1 < n_) {
      const double cov = (sum_lag_[k] - nn * means[k] * means[k + 1]) / (nn - 1.0);
      const double denom = std::sqrt(vars[k] * vars[k + 1]);
      s.lag1_corr = denom > 0.0 ? cov / denom : 0.0;
      s.se_corr = 1.0 / std::sqrt(nn);
      s.z_corr = std::fabs(s.lag1_corr) / s.se_corr;
    }
    s.pass = s.z_mean <= z_threshold && s.z_var <= z_threshold && s.z_corr <= z_threshold;
    stats.all_pass = stats.all_pass && s.pass;
  }
  return stats;
}

InnovationStats innovation_bm_test(const std::vector<InnovationPath>& ensemble,
                                   double z_threshold) {
  if (ensemble.size() < 2) {
    throw std::invalid_argument("innovation_bm_test: need at least 2 paths");
  }
  const std::size_t n = ensemble.front().grid->steps();
  InnovationMoments acc(n);
  std::vector<double> dz(n);
  for (const auto& z : ensemble) {
    if (!z.grid->same_points_as(*ensemble.front().grid)) {
      throw std::invalid_argument("innovation_bm_test: mixed grids");
    }
    for (std::size_t k = 0; k < n; ++k) dz[k] = z.values[k + 1] - z.values[k];
    acc.add_increments(dz);
  }
  return acc.finalize(*ensemble.front().grid, z_threshold);
}

}  // namespace wienerlab
