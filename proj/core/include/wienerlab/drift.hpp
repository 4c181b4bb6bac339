#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wienerlab/cameron_martin.hpp"
#include "wienerlab/sample_path.hpp"
#include "wienerlab/time_grid.hpp"

#include <json.hpp>

namespace wienerlab {

class DriftSpec;
using DriftPtr = std::shared_ptr<const DriftSpec>;

/// u_dot = 0.
struct ZeroDrift {};

/// Deterministic schedule: u_dot_k = rate on every step, or an explicit
/// per-step derivative table bound to a grid.
struct ConstantShift {
  double rate = 1.0;
  std::shared_ptr<const CameronMartinPath> schedule;  // optional, overrides rate
};

/// u_dot_t = gain * W(t_k) (current path value, left endpoint).
struct LinearFeedback {
  double gain = 1.0;
};

/// Fractional part of the previous completed block's increment slope, on
/// the geometric blocks [b_{k+1}, b_k), b_k = ratio^k. The drift of the
/// earliest blocks (those whose governing block would start below
/// ratio^k_max) and of the tail [0, ratio^k_max) is 0.
///
/// With sign = -1 the inverse equation dV = -u_dot o V dt + dW is exactly
/// the classical drift-with-+frac circular SDE.
struct TsirelsonDrift {
  double ratio = 0.5;
  int k_max = 3;
  int sign = -1;
};

/// factor * inner.
struct ScaledDrift {
  double factor = 1.0;
  DriftPtr inner;
};

/// inner on steps with t_k < t_stop, 0 afterwards. t_stop must be a grid
/// point of any grid the drift is evaluated on.
struct StoppedDrift {
  double t_stop = 1.0;
  DriftPtr inner;
};

/// Declarative adapted drift: evaluation at step k reads only path values
/// at t_0..t_k.
class DriftSpec {
 public:
  using Variant =
      std::variant<ZeroDrift, ConstantShift, LinearFeedback, TsirelsonDrift, ScaledDrift,
                   StoppedDrift>;

  explicit DriftSpec(Variant v) : v_(std::move(v)) {}

  [[nodiscard]] const Variant& variant() const noexcept { return v_; }
  [[nodiscard]] std::string name() const;
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static DriftSpec from_json(const nlohmann::json& j);

  template <typename T>
  [[nodiscard]] const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

DriftSpec zero_drift();
DriftSpec constant_shift(double rate);
DriftSpec constant_shift(std::shared_ptr<const CameronMartinPath> schedule);
DriftSpec linear_feedback(double gain);
DriftSpec tsirelson_drift(double ratio, int k_max, int sign = -1);
DriftSpec scaled_drift(double factor, DriftSpec inner);
DriftSpec stopped_drift(double t_stop, DriftSpec inner);

/// Drift bound to one grid: validates compatibility once (Tsirelson
/// breakpoints, schedule grids, stop times) and precomputes per-step
/// lookups so evaluation in the sampling loops is branch-light.
///
/// eval(values, k) reads only values[0..k]; the predictability checker
/// enforces this against the catalog.
class DriftEvaluator {
 public:
  DriftEvaluator(const DriftSpec& spec, GridPtr grid);

  [[nodiscard]] double eval(std::span<const double> path_values, std::size_t k) const;
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }

  /// All step drifts for one path (size n).
  void eval_all(std::span<const double> path_values, std::span<double> out) const;

 private:
  // Scaled/Stopped chains flatten onto one primitive with an accumulated
  // factor and the earliest stop step.
  enum class Primitive { Zero, Shift, Feedback, Tsirelson };

  GridPtr grid_;
  Primitive primitive_ = Primitive::Zero;
  double factor_ = 1.0;
  std::size_t stop_step_ = 0;  // steps >= stop_step_ contribute 0
  double rate_ = 0.0;          // Shift without schedule
  std::vector<double> schedule_;  // Shift with schedule (copied per step)
  double gain_ = 0.0;             // Feedback
  int sign_ = -1;                 // Tsirelson
  // Tsirelson lookup: per step, grid point indices (right, left) of the
  // governing block; right == npos marks zero-drift steps.
  std::vector<std::size_t> gov_right_, gov_left_;
  std::vector<double> inv_gov_span_;

  void compile(const DriftSpec& spec, double factor, std::size_t stop_step);
};

/// u_dot_k evaluated predictably on `path` at step k.
double eval_drift(const DriftSpec& spec, const SamplePath& path, std::size_t k);

/// The realized Cameron-Martin path u(w): step_derivatives[k] =
/// eval_drift(spec, path, k), values telescoped.
CameronMartinPath drift_path(const DriftSpec& spec, const SamplePath& path);

}  // namespace wienerlab
