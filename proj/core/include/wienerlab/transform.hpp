#pragma once

#include <utility>
#include <vector>

#include "wienerlab/cameron_martin.hpp"
#include "wienerlab/drift.hpp"
#include "wienerlab/sample_path.hpp"

namespace wienerlab {

/// Forward map U = I + u applied to one path.
struct TransformResult {
  SamplePath input;
  SamplePath output;                // U(w)
  CameronMartinPath drift_realized;  // u(w)
};

/// U(w)(t_k) = w(t_k) + sum_{j<k} u_dot_j(w) dt_j, with u_dot evaluated
/// predictably on the input path.
[[nodiscard]] TransformResult apply_U(const DriftSpec& spec, const SamplePath& path);

/// Batch forward map; output rows follow the input ensemble's order.
[[nodiscard]] PathEnsemble apply_U(const DriftSpec& spec, const PathEnsemble& ensemble);

enum class InverseMethod { Picard, SequentialEuler };

struct InverseSolveOptions {
  InverseMethod method = InverseMethod::SequentialEuler;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  bool keep_trace = false;
};

struct InverseSolveResult {
  SamplePath candidate;  // V(w)
  std::size_t iterations = 0;
  double residual = 0.0;  // sup-norm fixed-point defect
  bool converged = false;
  std::vector<double> trace;  // per-iteration residuals when requested
};

/// Solves the discrete fixed point V(t_k) = w(t_k) - sum_{j<k} u_dot_j(V) dt_j.
///
/// SequentialEuler fills V step by step; predictability makes the single
/// sweep exact. Picard iterates V <- w - drift(V) from V0 = w with a
/// divergence guard (residual growing 10x over 5 consecutive iterations).
[[nodiscard]] InverseSolveResult solve_inverse_sde(const DriftSpec& spec, const SamplePath& path,
                                                   const InverseSolveOptions& opts = {});

/// (sup_k |U(V(w)) - w|, sup_k |V(U(w)) - w|); the second runs the solver
/// on U(w).
[[nodiscard]] std::pair<double, double> composition_residual(
    const DriftSpec& spec, const SamplePath& path, const SamplePath& inverse_candidate,
    const InverseSolveOptions& opts = {});

/// Closed-form discrete inverses for Zero, ConstantShift and
/// LinearFeedback. For LinearFeedback the resolvent kernel
/// prod (1 - a dt) (the discrete e^{-a(t-s)}) is evaluated directly, an
/// independent route from the fixed-point solver. Throws for other
/// variants.
[[nodiscard]] SamplePath analytic_inverse(const DriftSpec& spec, const SamplePath& path);

}  // namespace wienerlab
