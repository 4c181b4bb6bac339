#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wienerlab/transform.hpp"

using namespace wienerlab;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

// Continuum resolvent V(t) = w(t) - a int_0^t e^{-a(t-s)} w(s) ds by
// left-point quadrature: the independent route used to pin the solver.
std::vector<double> resolvent_quadrature(const SamplePath& w, double a) {
  const TimeGrid& grid = *w.grid;
  const std::size_t n = grid.steps();
  std::vector<double> v(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double integral = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      integral += std::exp(-a * (grid.t(k) - grid.t(j))) * w.values[j] * grid.dt(j);
    }
    v[k] = w.values[k] - a * integral;
  }
  return v;
}

}  // namespace

TEST_CASE("apply_U with zero drift is the identity", "[transform]") {
  const auto grid = make_uniform_grid(16);
  const SamplePath w = sample_brownian_path(grid, 1, 5, 0);
  const TransformResult r = apply_U(zero_drift(), w);
  REQUIRE(r.output.values == w.values);
}

TEST_CASE("apply_U with a constant shift adds the schedule pointwise", "[transform]") {
  const auto grid = make_uniform_grid(8);
  const SamplePath w = sample_brownian_path(grid, 1, 5, 1);
  const TransformResult r = apply_U(constant_shift(2.0), w);
  for (std::size_t k = 0; k <= 8; ++k) {
    REQUIRE(r.output.values[k] == Catch::Approx(w.values[k] + 2.0 * grid->t(k)).margin(1e-14));
  }
  // Output = input + realized drift, grid point by grid point.
  for (std::size_t k = 0; k <= 8; ++k) {
    REQUIRE(r.output.values[k] == w.values[k] + r.drift_realized.values[k]);
  }
}

TEST_CASE("apply_U linear feedback on the explicit two-step path", "[transform]") {
  const auto grid = make_uniform_grid(2);
  const SamplePath w = path_from_values(grid, {0.0, 0.3, -0.2});
  const TransformResult r = apply_U(linear_feedback(1.0), w);
  REQUIRE(r.output.values[0] == 0.0);
  REQUIRE(r.output.values[1] == Catch::Approx(0.3).margin(1e-15));
  REQUIRE(r.output.values[2] == Catch::Approx(-0.2 + 0.3 * 0.5).margin(1e-15));
}

TEST_CASE("apply_U batch matches the scalar routine", "[transform]") {
  const auto grid = make_uniform_grid(12);
  const PathEnsemble e = sample_brownian(grid, 1, 8, 32);
  const PathEnsemble out = apply_U(linear_feedback(0.8), e);
  for (std::size_t p = 0; p < e.count; ++p) {
    const TransformResult r = apply_U(linear_feedback(0.8), e.extract(p));
    const auto row = out.path_values(p);
    REQUIRE(sup_diff(r.output.values, {row.begin(), row.end()}) == 0.0);
  }
}

TEST_CASE("inverse solve: zero drift returns the path unchanged", "[invert]") {
  const auto grid = make_uniform_grid(8);
  const SamplePath w = sample_brownian_path(grid, 1, 6, 0);
  for (auto method : {InverseMethod::SequentialEuler, InverseMethod::Picard}) {
    InverseSolveOptions opts;
    opts.method = method;
    const InverseSolveResult r = solve_inverse_sde(zero_drift(), w, opts);
    REQUIRE(r.converged);
    REQUIRE(r.iterations == 1);
    REQUIRE(r.residual == 0.0);
    REQUIRE(r.candidate.values == w.values);
  }
}

TEST_CASE("inverse solve: constant shift subtracts the schedule exactly", "[invert]") {
  const auto grid = make_uniform_grid(16);
  const SamplePath w = sample_brownian_path(grid, 1, 6, 1);
  for (auto method : {InverseMethod::SequentialEuler, InverseMethod::Picard}) {
    InverseSolveOptions opts;
    opts.method = method;
    const InverseSolveResult r = solve_inverse_sde(constant_shift(1.0), w, opts);
    REQUIRE(r.converged);
    const SamplePath exact = analytic_inverse(constant_shift(1.0), w);
    REQUIRE(sup_diff(r.candidate.values, exact.values) <= 1e-14);
  }
}

TEST_CASE("linear feedback: solver, kernel resolvent and quadrature agree", "[invert]") {
  const double a = 1.0;

  // Exact discrete agreement between the fixed-point solver and the
  // product-kernel resolvent.
  const auto grid = make_uniform_grid(64);
  const SamplePath w = sample_brownian_path(grid, 1, 42, 0);
  const SamplePath exact = analytic_inverse(linear_feedback(a), w);

  InverseSolveOptions opts;
  opts.method = InverseMethod::SequentialEuler;
  const InverseSolveResult seq = solve_inverse_sde(linear_feedback(a), w, opts);
  REQUIRE(seq.converged);
  REQUIRE(sup_diff(seq.candidate.values, exact.values) <= 1e-12);

  opts.method = InverseMethod::Picard;
  const InverseSolveResult pic = solve_inverse_sde(linear_feedback(a), w, opts);
  REQUIRE(pic.converged);
  REQUIRE(sup_diff(pic.candidate.values, seq.candidate.values) <= 10 * opts.tol);

  // The continuum-kernel quadrature converges to the discrete solution at
  // first order as the grid refines.
  double prev_err = 0.0;
  std::size_t i = 0;
  for (std::size_t n : {32u, 128u, 512u}) {
    const auto g = make_uniform_grid(n);
    const SamplePath path = sample_brownian_path(g, 1, 43, 7);
    const SamplePath inv = analytic_inverse(linear_feedback(a), path);
    const double err = sup_diff(inv.values, resolvent_quadrature(path, a));
    CAPTURE(n, err);
    if (i++ > 0) REQUIRE(err < 0.5 * prev_err);
    prev_err = err;
  }
}

TEST_CASE("composition residuals vanish for exactly invertible drifts", "[invert]") {
  const auto grid = make_uniform_grid(32);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const SamplePath w = sample_brownian_path(grid, 1, 51, i);
    for (const DriftSpec& spec :
         {zero_drift(), constant_shift(1.0), linear_feedback(1.0)}) {
      const InverseSolveResult r = solve_inverse_sde(spec, w);
      const auto [left, right] = composition_residual(spec, w, r.candidate);
      CAPTURE(spec.describe(), i);
      REQUIRE(left <= 1e-12);
      REQUIRE(right <= 1e-12);
    }
  }
}

TEST_CASE("sequential sweep solves the tsirelson inverse pathwise", "[invert][tsirelson]") {
  // At fixed discretization the inverse recursion is solvable path by
  // path; the de-facto residuals stay at round-off scale and are reported
  // as diagnostics, never as an invertibility verdict.
  const auto grid = make_geometric_grid(0.5, 3, 4);
  const DriftSpec spec = tsirelson_drift(0.5, 3);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const SamplePath w = sample_brownian_path(grid, 1, 60, i);
    const InverseSolveResult r = solve_inverse_sde(spec, w);
    REQUIRE(r.iterations == 1);
    REQUIRE(r.residual <= 1e-12);
    const auto [left, right] = composition_residual(spec, w, r.candidate);
    REQUIRE(left <= 1e-10);
    REQUIRE(right <= 1e-10);
  }
}

TEST_CASE("picard guard reports non-convergence instead of looping", "[invert]") {
  // gain large enough that the Picard map is expanding on coarse grids.
  const auto grid = make_uniform_grid(4);
  const SamplePath w = sample_brownian_path(grid, 1, 61, 0);
  InverseSolveOptions opts;
  opts.method = InverseMethod::Picard;
  opts.max_iter = 500;
  const InverseSolveResult r = solve_inverse_sde(linear_feedback(12.0), w, opts);
  REQUIRE_FALSE(r.converged);
}

TEST_CASE("apply_U with a zero-scaled drift is the identity for every inner",
          "[transform]") {
  const auto grid = make_geometric_grid(0.5, 3, 2);
  const SamplePath w = sample_brownian_path(grid, 1, 62, 0);
  for (const DriftSpec& inner :
       {linear_feedback(3.0), tsirelson_drift(0.5, 3), constant_shift(5.0)}) {
    const TransformResult r = apply_U(scaled_drift(0.0, inner), w);
    REQUIRE(r.output.values == w.values);
  }
}

TEST_CASE("analytic_inverse rejects unsupported variants", "[invert]") {
  const auto grid = make_geometric_grid(0.5, 3);
  const SamplePath w = sample_brownian_path(grid, 1, 63, 0);
  REQUIRE_THROWS_AS(analytic_inverse(tsirelson_drift(0.5, 3), w), std::invalid_argument);
  REQUIRE_THROWS_AS(analytic_inverse(scaled_drift(2.0, zero_drift()), w),
                    std::invalid_argument);
}

TEST_CASE("solver options are validated", "[invert]") {
  const auto grid = make_uniform_grid(4);
  const SamplePath w = sample_brownian_path(grid, 1, 64, 0);
  InverseSolveOptions opts;
  opts.tol = 0.0;
  REQUIRE_THROWS_AS(solve_inverse_sde(zero_drift(), w, opts), std::invalid_argument);
  opts.tol = 1e-10;
  opts.max_iter = 0;
  REQUIRE_THROWS_AS(solve_inverse_sde(zero_drift(), w, opts), std::invalid_argument);
}
