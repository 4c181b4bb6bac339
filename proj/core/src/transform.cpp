#include "wienerlab/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wienerlab/parallel.hpp"

namespace wienerlab {

namespace {

void require_scalar(const SamplePath& path, const char* where) {
  if (path.dim != 1) throw std::invalid_argument(std::string(where) + ": catalog drifts are 1-d");
}

}  // namespace

TransformResult apply_U(const DriftSpec& spec, const SamplePath& path) {
  require_scalar(path, "apply_U");
  DriftEvaluator ev(spec, path.grid);
  const std::size_t n = path.grid->steps();

  std::vector<double> derivs(n);
  ev.eval_all(path.values, derivs);
  auto realized = cm_from_derivatives(path.grid, std::move(derivs));

  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = path.values[k] + realized.values[k];

  TransformResult r;
  r.input = path;
  r.output = path_from_values(path.grid, std::move(out));
  r.drift_realized = std::move(realized);
  return r;
}

PathEnsemble apply_U(const DriftSpec& spec, const PathEnsemble& ensemble) {
  if (ensemble.dim != 1) throw std::invalid_argument("apply_U: catalog drifts are 1-d");
  DriftEvaluator ev(spec, ensemble.grid);
  PathEnsemble out = ensemble;
  const std::size_t n = ensemble.grid->steps();
  parallel_for_chunked(0, ensemble.count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const auto in = ensemble.path_values(p);
      auto dst = out.path_values_mut(p);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += ev.eval(in, k) * ensemble.grid->dt(k);
        dst[k + 1] = in[k + 1] + acc;
      }
    }
  });
  return out;
}

namespace {

// Fixed-point defect sup_k |V(t_k) - (w(t_k) - sum_{j<k} u_dot_j(V) dt_j)|.
double fixed_point_defect(const DriftEvaluator& ev, std::span<const double> w,
                          std::span<const double> v, const TimeGrid& grid) {
  const std::size_t n = grid.steps();
  double acc = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += ev.eval(v, k) * grid.dt(k);
    worst = std::max(worst, std::fabs(v[k + 1] - (w[k + 1] - acc)));
  }
  return worst;
}

}  // namespace

InverseSolveResult solve_inverse_sde(const DriftSpec& spec, const SamplePath& path,
                                     const InverseSolveOptions& opts) {
  require_scalar(path, "solve_inverse_sde");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_inverse_sde: tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("solve_inverse_sde: max_iter must be >= 1");
  DriftEvaluator ev(spec, path.grid);
  const TimeGrid& grid = *path.grid;
  const std::size_t n = grid.steps();

  InverseSolveResult result;

  if (opts.method == InverseMethod::SequentialEuler) {
    // Predictability: u_dot_k(V) reads V only up to t_k, so one forward
    // sweep solves the fixed point exactly.
    std::vector<double> v(n + 1);
    v[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += ev.eval(v, k) * grid.dt(k);
      v[k + 1] = path.values[k + 1] - acc;
      if (!std::isfinite(v[k + 1])) {
        throw std::runtime_error("solve_inverse_sde: non-finite iterate");
      }
    }
    result.iterations = 1;
    result.residual = fixed_point_defect(ev, path.values, v, grid);
    result.converged = result.residual <= opts.tol;
    result.candidate = path_from_values(path.grid, std::move(v));
    if (opts.keep_trace) result.trace.push_back(result.residual);
    return result;
  }

  // Picard iteration from V0 = w.
  std::vector<double> v = path.values;
  std::vector<double> next(n + 1);
  double prev_residual = std::numeric_limits<double>::infinity();
  std::size_t growth_streak = 0;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    next[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += ev.eval(v, k) * grid.dt(k);
      next[k + 1] = path.values[k + 1] - acc;
      if (!std::isfinite(next[k + 1])) {
        throw std::runtime_error("solve_inverse_sde: non-finite iterate");
      }
    }
    double residual = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      residual = std::max(residual, std::fabs(next[k] - v[k]));
    }
    v.swap(next);
    result.iterations = it;
    result.residual = residual;
    if (opts.keep_trace) result.trace.push_back(residual);
    if (residual <= opts.tol) {
      result.converged = true;
      break;
    }
    if (residual > 10.0 * prev_residual) {
      if (++growth_streak >= 5) break;
    } else {
      growth_streak = 0;
    }
    prev_residual = residual;
  }
  result.candidate = path_from_values(path.grid, std::move(v));
  return result;
}

std::pair<double, double> composition_residual(const DriftSpec& spec, const SamplePath& path,
                                               const SamplePath& inverse_candidate,
                                               const InverseSolveOptions& opts) {
  if (!path.grid->same_points_as(*inverse_candidate.grid)) {
    throw std::invalid_argument("composition_residual: grid mismatch");
  }
  const std::size_t n = path.grid->steps();

  // Left: U(V(w)) vs w.
  const TransformResult uv = apply_U(spec, inverse_candidate);
  double left = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    left = std::max(left, std::fabs(uv.output.values[k] - path.values[k]));
  }

  // Right: V(U(w)) vs w, running the solver on U(w).
  const TransformResult uw = apply_U(spec, path);
  const InverseSolveResult inv = solve_inverse_sde(spec, uw.output, opts);
  double right = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    right = std::max(right, std::fabs(inv.candidate.values[k] - path.values[k]));
  }
  return {left, right};
}

SamplePath analytic_inverse(const DriftSpec& spec, const SamplePath& path) {
  require_scalar(path, "analytic_inverse");
  const TimeGrid& grid = *path.grid;
  const std::size_t n = grid.steps();

  if (spec.get_if<ZeroDrift>() != nullptr) {
    return path;
  }
  if (const auto* s = spec.get_if<ConstantShift>()) {
    std::vector<double> derivs(n);
    if (s->schedule) {
      if (!s->schedule->grid->same_points_as(grid)) {
        throw std::invalid_argument("analytic_inverse: schedule grid mismatch");
      }
      derivs = s->schedule->step_derivatives;
    } else {
      derivs.assign(n, s->rate);
    }
    const auto h = cm_from_derivatives(path.grid, std::move(derivs));
    std::vector<double> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) v[k] = path.values[k] - h.values[k];
    return path_from_values(path.grid, std::move(v));
  }
  if (const auto* s = spec.get_if<LinearFeedback>()) {
    // V(t_k) = sum_{j<k} R(k, j) dW_j with R(k, j) = prod_{i=j+1}^{k-1}
    // (1 - a dt_i): the resolvent kernel of the linear Volterra equation,
    // the discrete counterpart of e^{-a(t_k - t_j)}.
    const double a = s->gain;
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double kernel = 1.0;
        for (std::size_t i = j + 1; i < k; ++i) kernel *= 1.0 - a * grid.dt(i);
        acc += kernel * (path.values[j + 1] - path.values[j]);
      }
      v[k] = acc;
    }
    return path_from_values(path.grid, std::move(v));
  }
  throw std::invalid_argument("analytic_inverse: unsupported drift variant \"" + spec.name() +
                              '"');
}

}  // namespace wienerlab
