#include "wienerlab/drift.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wienerlab {

using nlohmann::json;

DriftSpec zero_drift() { return DriftSpec{ZeroDrift{}}; }

DriftSpec constant_shift(double rate) { return DriftSpec{ConstantShift{rate, nullptr}}; }

DriftSpec constant_shift(std::shared_ptr<const CameronMartinPath> schedule) {
  if (!schedule) throw std::invalid_argument("constant_shift: null schedule");
  return DriftSpec{ConstantShift{0.0, std::move(schedule)}};
}

DriftSpec linear_feedback(double gain) { return DriftSpec{LinearFeedback{gain}}; }

DriftSpec tsirelson_drift(double ratio, int k_max, int sign) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("tsirelson_drift: ratio must be in (0,1)");
  }
  if (k_max < 1) throw std::invalid_argument("tsirelson_drift: k_max must be >= 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("tsirelson_drift: sign must be +-1");
  return DriftSpec{TsirelsonDrift{ratio, k_max, sign}};
}

DriftSpec scaled_drift(double factor, DriftSpec inner) {
  return DriftSpec{ScaledDrift{factor, std::make_shared<const DriftSpec>(std::move(inner))}};
}

DriftSpec stopped_drift(double t_stop, DriftSpec inner) {
  if (!(t_stop >= 0.0 && t_stop <= 1.0)) {
    throw std::invalid_argument("stopped_drift: t_stop must be in [0,1]");
  }
  return DriftSpec{StoppedDrift{t_stop, std::make_shared<const DriftSpec>(std::move(inner))}};
}

std::string DriftSpec::name() const {
  struct Visitor {
    std::string operator()(const ZeroDrift&) const { return "zero"; }
    std::string operator()(const ConstantShift&) const { return "constant-shift"; }
    std::string operator()(const LinearFeedback&) const { return "linear-feedback"; }
    std::string operator()(const TsirelsonDrift&) const { return "tsirelson"; }
    std::string operator()(const ScaledDrift&) const { return "scaled"; }
    std::string operator()(const StoppedDrift&) const { return "stopped"; }
  };
  return std::visit(Visitor{}, v_);
}

std::string DriftSpec::describe() const {
  std::ostringstream os;
  struct Visitor {
    std::ostringstream& os;
    void operator()(const ZeroDrift&) const { os << "zero"; }
    void operator()(const ConstantShift& s) const {
      if (s.schedule) {
        os << "constant-shift(schedule,n=" << s.schedule->steps() << ")";
      } else {
        os << "constant-shift(rate=" << s.rate << ")";
      }
    }
    void operator()(const LinearFeedback& s) const { os << "linear-feedback(a=" << s.gain << ")"; }
    void operator()(const TsirelsonDrift& s) const {
      os << "tsirelson(ratio=" << s.ratio << ",k_max=" << s.k_max << ",sign=" << s.sign << ")";
    }
    void operator()(const ScaledDrift& s) const {
      os << "scaled(c=" << s.factor << "," << s.inner->describe() << ")";
    }
    void operator()(const StoppedDrift& s) const {
      os << "stopped(t_stop=" << s.t_stop << "," << s.inner->describe() << ")";
    }
  };
  std::visit(Visitor{os}, v_);
  return os.str();
}

json DriftSpec::to_json() const {
  struct Visitor {
    json operator()(const ZeroDrift&) const { return json{{"variant", "zero"}}; }
    json operator()(const ConstantShift& s) const {
      json j{{"variant", "constant-shift"}};
      if (s.schedule) {
        j["schedule"] = {{"points", s.schedule->grid->points()},
                         {"derivatives", s.schedule->step_derivatives}};
      } else {
        j["rate"] = s.rate;
      }
      return j;
    }
    json operator()(const LinearFeedback& s) const {
      return json{{"variant", "linear-feedback"}, {"a", s.gain}};
    }
    json operator()(const TsirelsonDrift& s) const {
      return json{{"variant", "tsirelson"}, {"ratio", s.ratio}, {"k_max", s.k_max},
                  {"sign", s.sign}};
    }
    json operator()(const ScaledDrift& s) const {
      return json{{"variant", "scaled"}, {"c", s.factor}, {"inner", s.inner->to_json()}};
    }
    json operator()(const StoppedDrift& s) const {
      return json{{"variant", "stopped"}, {"t_stop", s.t_stop}, {"inner", s.inner->to_json()}};
    }
  };
  return std::visit(Visitor{}, v_);
}

DriftSpec DriftSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw std::invalid_argument("DriftSpec: expected object with a \"variant\" field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  auto number = [&j](const char* primary, const char* alias, double fallback,
                     bool required = false) {
    if (j.contains(primary)) return j.at(primary).get<double>();
    if (alias != nullptr && j.contains(alias)) return j.at(alias).get<double>();
    if (required) {
      throw std::invalid_argument(std::string("DriftSpec: missing field \"") + primary + '"');
    }
    return fallback;
  };

  if (variant == "zero") return zero_drift();
  if (variant == "constant-shift") {
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      auto grid = make_explicit_grid(s.at("points").get<std::vector<double>>());
      auto cm = cm_from_derivatives(std::move(grid),
                                    s.at("derivatives").get<std::vector<double>>());
      return constant_shift(std::make_shared<const CameronMartinPath>(std::move(cm)));
    }
    return constant_shift(number("rate", "hdot", 1.0));
  }
  if (variant == "linear-feedback") return linear_feedback(number("a", "gain", 1.0, true));
  if (variant == "tsirelson") {
    const double ratio = number("ratio", nullptr, 0.5, true);
    const int k_max = j.contains("k_max") ? j.at("k_max").get<int>()
                      : j.contains("kmax") ? j.at("kmax").get<int>()
                                           : throw std::invalid_argument(
                                                 "DriftSpec: tsirelson needs k_max");
    const int sign = j.contains("sign") ? j.at("sign").get<int>() : -1;
    return tsirelson_drift(ratio, k_max, sign);
  }
  if (variant == "scaled") {
    return scaled_drift(number("c", "factor", 1.0, true),
                        from_json(j.at("inner")));
  }
  if (variant == "stopped") {
    return stopped_drift(number("t_stop", "tstop", 1.0, true), from_json(j.at("inner")));
  }
  throw std::invalid_argument("DriftSpec: unknown variant \"" + variant + '"');
}

// ---------------------------------------------------------------------------
// DriftEvaluator
// ---------------------------------------------------------------------------

DriftEvaluator::DriftEvaluator(const DriftSpec& spec, GridPtr grid) : grid_(std::move(grid)) {
  stop_step_ = grid_->steps();
  compile(spec, 1.0, grid_->steps());
}

void DriftEvaluator::compile(const DriftSpec& spec, double factor, std::size_t stop_step) {
  const std::size_t n = grid_->steps();
  if (const auto* s = spec.get_if<ScaledDrift>()) {
    compile(*s->inner, factor * s->factor, stop_step);
    return;
  }
  if (const auto* s = spec.get_if<StoppedDrift>()) {
    const std::size_t idx = grid_->index_of(s->t_stop);
    if (idx == TimeGrid::npos) {
      std::ostringstream os;
      os << "drift incompatible with grid: stop time " << s->t_stop << " is not a grid point";
      throw std::invalid_argument(os.str());
    }
    compile(*s->inner, factor, std::min(stop_step, idx));
    return;
  }

  factor_ = factor;
  stop_step_ = stop_step;
  if (spec.get_if<ZeroDrift>() != nullptr) {
    primitive_ = Primitive::Zero;
    return;
  }
  if (const auto* s = spec.get_if<ConstantShift>()) {
    primitive_ = Primitive::Shift;
    if (s->schedule) {
      if (!s->schedule->grid->same_points_as(*grid_)) {
        throw std::invalid_argument(
            "drift incompatible with grid: constant-shift schedule lives on a different grid");
      }
      schedule_ = s->schedule->step_derivatives;
    } else {
      rate_ = s->rate;
    }
    return;
  }
  if (const auto* s = spec.get_if<LinearFeedback>()) {
    primitive_ = Primitive::Feedback;
    gain_ = s->gain;
    return;
  }
  const auto* ts = spec.get_if<TsirelsonDrift>();
  primitive_ = Primitive::Tsirelson;
  sign_ = ts->sign;

  // Breakpoint grid-point indices i_k for b_k = ratio^k, k = k_max..0.
  // Scanning in increasing time reports the earliest missing breakpoint.
  std::vector<std::size_t> bp_index(static_cast<std::size_t>(ts->k_max) + 1);
  for (int k = ts->k_max; k >= 0; --k) {
    const double t = std::pow(ts->ratio, k);
    const std::size_t idx = grid_->index_of(t);
    if (idx == TimeGrid::npos) {
      std::ostringstream os;
      os << "drift incompatible with grid: missing Tsirelson breakpoint t=" << t
         << " (ratio^" << k << ")";
      throw std::invalid_argument(os.str());
    }
    bp_index[static_cast<std::size_t>(k)] = idx;
  }

  gov_right_.assign(n, TimeGrid::npos);
  gov_left_.assign(n, TimeGrid::npos);
  inv_gov_span_.assign(n, 0.0);
  // Step j lies in block m iff i_{m+1} <= j < i_m; its governing block is
  // [b_{m+2}, b_{m+1}], which exists only for m <= k_max - 2.
  for (std::size_t j = 0; j < n; ++j) {
    for (int m = 0; m + 2 <= ts->k_max; ++m) {
      const std::size_t lo = bp_index[static_cast<std::size_t>(m + 1)];
      const std::size_t hi = bp_index[static_cast<std::size_t>(m)];
      if (j >= lo && j < hi) {
        const std::size_t gr = lo;
        const std::size_t gl = bp_index[static_cast<std::size_t>(m + 2)];
        gov_right_[j] = gr;
        gov_left_[j] = gl;
        inv_gov_span_[j] = 1.0 / (grid_->t(gr) - grid_->t(gl));
        break;
      }
    }
  }
}

double DriftEvaluator::eval(std::span<const double> path_values, std::size_t k) const {
  if (k >= grid_->steps()) throw std::out_of_range("DriftEvaluator::eval: step out of range");
  if (k >= stop_step_) return 0.0;
  switch (primitive_) {
    case Primitive::Zero:
      return 0.0;
    case Primitive::Shift:
      return factor_ * (schedule_.empty() ? rate_ : schedule_[k]);
    case Primitive::Feedback:
      return factor_ * gain_ * path_values[k];
    case Primitive::Tsirelson: {
      const std::size_t gr = gov_right_[k];
      if (gr == TimeGrid::npos) return 0.0;
      const double slope = (path_values[gr] - path_values[gov_left_[k]]) * inv_gov_span_[k];
      return factor_ * static_cast<double>(sign_) * (slope - std::floor(slope));
    }
  }
  return 0.0;
}

void DriftEvaluator::eval_all(std::span<const double> path_values, std::span<double> out) const {
  const std::size_t n = grid_->steps();
  if (out.size() != n) throw std::invalid_argument("eval_all: output size mismatch");
  for (std::size_t k = 0; k < n; ++k) out[k] = eval(path_values, k);
}

double eval_drift(const DriftSpec& spec, const SamplePath& path, std::size_t k) {
  if (path.dim != 1) throw std::invalid_argument("eval_drift: catalog drifts are 1-d");
  DriftEvaluator ev(spec, path.grid);
  return ev.eval(path.values, k);
}

CameronMartinPath drift_path(const DriftSpec& spec, const SamplePath& path) {
  if (path.dim != 1) throw std::invalid_argument("drift_path: catalog drifts are 1-d");
  DriftEvaluator ev(spec, path.grid);
  std::vector<double> derivs(path.grid->steps());
  ev.eval_all(path.values, derivs);
  return cm_from_derivatives(path.grid, std::move(derivs));
}

}  // namespace wienerlab
