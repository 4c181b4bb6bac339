#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wienerlab/girsanov.hpp"

using namespace wienerlab;

TEST_CASE("ito_sum telescopes constant integrands", "[girsanov]") {
  const auto grid = make_uniform_grid(8);
  const SamplePath w = sample_brownian_path(grid, 1, 12, 0);

  const auto one = cm_from_derivatives(grid, std::vector<double>(8, 1.0));
  REQUIRE(ito_sum(one, w) == Catch::Approx(w.values.back()).margin(1e-14));

  const auto zero = cm_from_derivatives(grid, std::vector<double>(8, 0.0));
  REQUIRE(ito_sum(zero, w) == 0.0);

  // Indicator of [0, 0.5) picks up W(0.5).
  std::vector<double> half(8, 0.0);
  for (std::size_t k = 0; k < 4; ++k) half[k] = 1.0;
  const auto ind = cm_from_derivatives(grid, std::move(half));
  REQUIRE(ito_sum(ind, w) == Catch::Approx(w.value(4)).margin(1e-14));

  const auto other = cm_from_derivatives(make_uniform_grid(4), std::vector<double>(4, 1.0));
  REQUIRE_THROWS_AS(ito_sum(other, w), std::invalid_argument);
}

TEST_CASE("girsanov weight of the zero drift is one", "[girsanov]") {
  const auto grid = make_uniform_grid(16);
  const SamplePath w = sample_brownian_path(grid, 1, 4, 1);
  const GirsanovWeight g = girsanov_weight(zero_drift(), w, -1);
  REQUIRE(g.log_weight == 0.0);
  REQUIRE(g.weight == 1.0);
}

TEST_CASE("constant shift weight is the explicit exponential", "[girsanov]") {
  const auto grid = make_uniform_grid(10);
  std::vector<double> values(11, 0.0);
  for (std::size_t k = 1; k <= 10; ++k) values[k] = 0.3 * grid->t(k);  // W(1) = 0.3
  const SamplePath w = path_from_values(grid, std::move(values));

  const GirsanovWeight g = girsanov_weight(constant_shift(1.0), w, -1);
  REQUIRE(g.log_weight == Catch::Approx(-0.3 - 0.5).margin(1e-12));
  REQUIRE(g.weight == Catch::Approx(std::exp(-0.8)).margin(1e-12));
}

TEST_CASE("linear feedback weight on an explicit two-step path", "[girsanov]") {
  const auto grid = make_uniform_grid(2);
  const SamplePath w = path_from_values(grid, {0.0, 0.3, -0.2});
  // u_dot_0 = 0, u_dot_1 = 0.3; ito = 0.3 * (-0.5); energy = 0.09 * 0.5.
  const GirsanovWeight plus = girsanov_weight(linear_feedback(1.0), w, +1);
  REQUIRE(plus.log_weight == Catch::Approx(-0.1725).margin(1e-15));
  const GirsanovWeight minus = girsanov_weight(linear_feedback(1.0), w, -1);
  REQUIRE(minus.log_weight == Catch::Approx(0.15 - 0.0225).margin(1e-15));
}

TEST_CASE("log rho(u) + log rho(-u) = -sum u^2 dt exactly", "[girsanov]") {
  const auto grid = make_geometric_grid(0.5, 3, 4);
  const std::vector<DriftSpec> specs = {constant_shift(0.7), linear_feedback(1.3),
                                        tsirelson_drift(0.5, 3),
                                        stopped_drift(0.25, linear_feedback(2.0))};
  for (const DriftSpec& spec : specs) {
    for (std::uint64_t i = 0; i < 16; ++i) {
      const SamplePath w = sample_brownian_path(grid, 1, 31, i);
      const double lp = girsanov_weight(spec, w, +1).log_weight;
      const double lm = girsanov_weight(spec, w, -1).log_weight;
      const CameronMartinPath u = drift_path(spec, w);
      REQUIRE(lp + lm == Catch::Approx(-cm_norm_sq(u)).margin(1e-12));
    }
  }
}

TEST_CASE("scaled drift rescales the stochastic and energy terms", "[girsanov]") {
  const auto grid = make_uniform_grid(16);
  const double c = 1.7;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const SamplePath w = sample_brownian_path(grid, 1, 77, i);
    const CameronMartinPath u = drift_path(linear_feedback(1.0), w);
    const double ito = ito_sum(u, w);
    const double energy = cm_norm_sq(u);
    const GirsanovWeight g = girsanov_weight(scaled_drift(c, linear_feedback(1.0)), w, +1);
    REQUIRE(g.log_weight == Catch::Approx(c * ito - 0.5 * c * c * energy).margin(1e-12));
  }
}

TEST_CASE("normalization check: zero drift is exact", "[girsanov]") {
  const McEstimate e = check_normalization(zero_drift(), make_uniform_grid(8), 100, 1);
  REQUIRE(e.mean == 1.0);
  REQUIRE(e.std_error == 0.0);
  REQUIRE(e.n_samples == 100);
}

TEST_CASE("normalization check covers one for catalog drifts", "[girsanov][statistical]") {
  const auto grid = make_uniform_grid(64);
  const std::size_t count = 20000;

  const McEstimate shift = check_normalization(constant_shift(1.0), grid, count, 11);
  CAPTURE(shift.mean, shift.std_error);
  REQUIRE(shift.covers(1.0, 3.0));

  const McEstimate ts = check_normalization(tsirelson_drift(0.5, 3), grid, count, 12);
  CAPTURE(ts.mean, ts.std_error);
  REQUIRE(ts.covers(1.0, 3.0));
}
