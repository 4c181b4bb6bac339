#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wienerlab/drift.hpp"
#include "wienerlab/predictability.hpp"
#include "wienerlab/sample_path.hpp"

using namespace wienerlab;

namespace {

SamplePath zero_path(const GridPtr& grid) {
  return path_from_values(grid, std::vector<double>(grid->points().size(), 0.0));
}

}  // namespace

TEST_CASE("zero drift evaluates to zero everywhere", "[drift]") {
  const auto grid = make_uniform_grid(8);
  const SamplePath w = sample_brownian_path(grid, 1, 3, 0);
  const DriftSpec spec = zero_drift();
  for (std::size_t k = 0; k < grid->steps(); ++k) REQUIRE(eval_drift(spec, w, k) == 0.0);
}

TEST_CASE("linear feedback reads the current path value", "[drift]") {
  const auto grid = make_uniform_grid(4);
  const SamplePath w = path_from_values(grid, {0.0, 0.7, 0.2, -0.1, 0.4});
  const DriftSpec spec = linear_feedback(1.0);
  REQUIRE(eval_drift(spec, w, 1) == 0.7);
  REQUIRE(eval_drift(spec, w, 3) == -0.1);
  REQUIRE(eval_drift(linear_feedback(-2.0), w, 1) == -1.4);
}

TEST_CASE("tsirelson drift takes the fractional slope of the previous block",
          "[drift][tsirelson]") {
  const auto grid = make_geometric_grid(0.5, 3);
  // Governing block for steps in [0.25, 0.5) is [0.125, 0.25]; build the
  // increment so its slope is 1.75.
  std::vector<double> values = {0.0, 0.1, 0.1 + 1.75 * 0.125, 0.6, 0.9};
  const SamplePath w = path_from_values(grid, std::move(values));
  const std::size_t step = grid->index_of(0.25);

  const DriftSpec minus = tsirelson_drift(0.5, 3, -1);
  REQUIRE(eval_drift(minus, w, step) == Catch::Approx(-0.75).margin(1e-12));
  const DriftSpec plus = tsirelson_drift(0.5, 3, +1);
  REQUIRE(eval_drift(plus, w, step) == Catch::Approx(0.75).margin(1e-12));

  // Negative slope: frac(-1.75) = 0.25.
  std::vector<double> values2 = {0.0, 0.1, 0.1 - 1.75 * 0.125, 0.0, 0.0};
  const SamplePath w2 = path_from_values(grid, std::move(values2));
  REQUIRE(eval_drift(minus, w2, step) == Catch::Approx(-0.25).margin(1e-12));

  // Tail and earliest blocks carry no drift.
  REQUIRE(eval_drift(minus, w, 0) == 0.0);
  REQUIRE(eval_drift(minus, w, grid->index_of(0.125)) == 0.0);

  // Last block is governed by [0.25, 0.5].
  const std::size_t last = grid->index_of(0.5);
  const double slope = (w.value(grid->index_of(0.5)) - w.value(grid->index_of(0.25))) / 0.25;
  REQUIRE(eval_drift(minus, w, last) ==
          Catch::Approx(-(slope - std::floor(slope))).margin(1e-12));
}

TEST_CASE("tsirelson requires its breakpoints on the grid", "[drift][tsirelson]") {
  const DriftSpec spec = tsirelson_drift(0.5, 3);
  REQUIRE_NOTHROW(DriftEvaluator(spec, make_uniform_grid(128)));
  try {
    DriftEvaluator ev(spec, make_uniform_grid(100));
    FAIL("expected incompatible grid to throw");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("0.125") != std::string::npos);
  }
}

TEST_CASE("drift_path telescopes the realized derivatives", "[drift]") {
  const auto grid = make_uniform_grid(4);
  const SamplePath w = sample_brownian_path(grid, 1, 9, 2);

  const CameronMartinPath zero = drift_path(zero_drift(), w);
  for (double v : zero.values) REQUIRE(v == 0.0);

  const CameronMartinPath shift = drift_path(constant_shift(1.0), w);
  for (std::size_t k = 0; k <= 4; ++k) {
    REQUIRE(shift.value(k) == Catch::Approx(grid->t(k)).margin(1e-15));
  }

  const CameronMartinPath stopped =
      drift_path(stopped_drift(0.5, constant_shift(1.0)), w);
  REQUIRE(stopped.values == std::vector<double>{0.0, 0.25, 0.5, 0.5, 0.5});

  REQUIRE_THROWS_AS(drift_path(stopped_drift(0.3, constant_shift(1.0)), w),
                    std::invalid_argument);
}

TEST_CASE("scaled drift is an exact multiple", "[drift]") {
  const auto grid = make_uniform_grid(8);
  const DriftSpec base = linear_feedback(1.0);
  const DriftSpec scaled = scaled_drift(2.5, linear_feedback(1.0));
  for (std::uint64_t i = 0; i < 8; ++i) {
    const SamplePath w = sample_brownian_path(grid, 1, 17, i);
    for (std::size_t k = 0; k < grid->steps(); ++k) {
      REQUIRE(eval_drift(scaled, w, k) == 2.5 * eval_drift(base, w, k));
    }
  }
  // Scaled(0, s) vanishes; LinearFeedback(0) equals Zero.
  const SamplePath w = sample_brownian_path(grid, 1, 17, 0);
  for (std::size_t k = 0; k < grid->steps(); ++k) {
    REQUIRE(eval_drift(scaled_drift(0.0, tsirelson_drift(0.5, 2)), w, k) == 0.0);
    REQUIRE(eval_drift(linear_feedback(0.0), w, k) == eval_drift(zero_drift(), w, k));
  }
}

TEST_CASE("tsirelson values stay in [0,1) before sign", "[drift][tsirelson]") {
  const auto grid = make_geometric_grid(0.5, 4, 3);
  const DriftSpec spec = tsirelson_drift(0.5, 4, -1);
  for (std::uint64_t i = 0; i < 32; ++i) {
    const SamplePath w = sample_brownian_path(grid, 1, 23, i);
    for (std::size_t k = 0; k < grid->steps(); ++k) {
      const double v = eval_drift(spec, w, k);
      REQUIRE(v <= 0.0);
      REQUIRE(v > -1.0);
    }
  }
}

TEST_CASE("catalog drifts are predictable on trees", "[drift][predictability]") {
  const auto geo = make_geometric_grid(0.5, 3, 2);
  const TreeModel geo_tree = TreeModel::rademacher(geo);
  const auto uni = make_uniform_grid(8);
  const TreeModel uni_tree = TreeModel::gauss_hermite(uni, 3);

  REQUIRE(check_predictability(zero_drift(), uni_tree).passed);
  REQUIRE(check_predictability(constant_shift(1.0), uni_tree).passed);
  REQUIRE(check_predictability(linear_feedback(1.0), uni_tree).passed);
  REQUIRE(check_predictability(tsirelson_drift(0.5, 3), geo_tree).passed);
  REQUIRE(check_predictability(scaled_drift(2.0, tsirelson_drift(0.5, 3)), geo_tree).passed);
  REQUIRE(check_predictability(stopped_drift(0.5, linear_feedback(1.0)), uni_tree).passed);
}

TEST_CASE("an anticipating evaluator is caught at its first violation",
          "[drift][predictability]") {
  const auto grid = make_uniform_grid(4);
  const TreePaths tree = enumerate_tree(TreeModel::rademacher(grid));
  // Adversarial fixture: reads W(1) at step 0.
  const auto report = check_predictability(
      [](std::span<const double> values, std::size_t k) {
        return k == 0 ? values.back() : 0.0;
      },
      tree);
  REQUIRE_FALSE(report.passed);
  REQUIRE(report.first_violation_step == 0);
}

TEST_CASE("drift specs round-trip through JSON", "[drift][json]") {
  const std::vector<DriftSpec> specs = {
      zero_drift(),
      constant_shift(1.5),
      linear_feedback(-0.75),
      tsirelson_drift(0.5, 3, 1),
      scaled_drift(2.0, stopped_drift(0.5, linear_feedback(1.0))),
  };
  for (const DriftSpec& spec : specs) {
    const DriftSpec back = DriftSpec::from_json(spec.to_json());
    REQUIRE(back.describe() == spec.describe());
    REQUIRE(back.to_json() == spec.to_json());
  }

  // Field aliases accepted on input.
  const auto fb = DriftSpec::from_json({{"variant", "linear-feedback"}, {"gain", 2.0}});
  REQUIRE(fb.describe() == "linear-feedback(a=2)");
  const auto ts =
      DriftSpec::from_json({{"variant", "tsirelson"}, {"ratio", 0.5}, {"kmax", 2}});
  REQUIRE(ts.describe() == "tsirelson(ratio=0.5,k_max=2,sign=-1)");

  REQUIRE_THROWS_AS(DriftSpec::from_json({{"variant", "unknown"}}), std::invalid_argument);
  REQUIRE_THROWS_AS(DriftSpec::from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST_CASE("constant shift accepts an explicit schedule", "[drift]") {
  const auto grid = make_uniform_grid(4);
  auto schedule = std::make_shared<const CameronMartinPath>(
      cm_from_derivatives(grid, {1.0, 2.0, 3.0, 4.0}));
  const DriftSpec spec = constant_shift(schedule);
  const SamplePath w = zero_path(grid);
  REQUIRE(eval_drift(spec, w, 0) == 1.0);
  REQUIRE(eval_drift(spec, w, 3) == 4.0);

  // Schedule bound to another grid is rejected.
  REQUIRE_THROWS_AS(DriftEvaluator(spec, make_uniform_grid(8)), std::invalid_argument);

  const DriftSpec back = DriftSpec::from_json(spec.to_json());
  REQUIRE(eval_drift(back, w, 3) == 4.0);
}
