#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "wienerlab/tree_model.hpp"

namespace wienerlab {

struct PredictabilityReport {
  bool passed = true;
  std::size_t first_violation_step = 0;
  std::size_t first_violation_path = 0;
  double spread = 0.0;  // max |difference| seen within one increment-prefix group
  std::string message;
};

/// Step evaluator under test: value(path values on the tree grid, step k).
using StepEvaluator = std::function<double(std::span<const double>, std::size_t)>;

class DriftSpec;

/// Exhaustive adaptedness check on a finite tree: two paths sharing
/// increments on steps 0..k-1 must produce identical step-k values, i.e.
/// nothing after t_k may leak in. Reports the first violating (step, path).
PredictabilityReport check_predictability(const StepEvaluator& eval, const TreePaths& tree);

/// Convenience overload: enumerates the model (tree cap applies).
PredictabilityReport check_predictability(const DriftSpec& spec, const TreeModel& model,
                                          std::size_t cap = kDefaultTreeCap);

}  // namespace wienerlab
