#include "wienerlab/predictability.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "wienerlab/drift.hpp"

namespace wienerlab {

PredictabilityReport check_predictability(const StepEvaluator& eval, const TreePaths& tree) {
  const std::size_t n = tree.paths.grid->steps();
  const std::size_t count = tree.paths.count;
  const std::size_t factor = static_cast<std::size_t>(tree.factor);
  PredictabilityReport report;

  // Paths are enumerated most-significant-digit first, so paths sharing
  // increments on steps 0..k-1 form contiguous runs of length
  // count / factor^k. Within a run the step-k value must be identical.
  std::size_t run = count;
  for (std::size_t k = 0; k < n; ++k, run /= factor) {
    for (std::size_t start = 0; start < count; start += run) {
      const double ref = eval(tree.paths.path_values(start), k);
      for (std::size_t p = start + 1; p < start + run; ++p) {
        const double v = eval(tree.paths.path_values(p), k);
        if (v != ref) {
          report.passed = false;
          report.first_violation_step = k;
          report.first_violation_path = p;
          report.spread = std::fabs(v - ref);
          std::ostringstream os;
          os << "value at step " << k << " depends on increments after t_" << k
             << " (paths " << start << " and " << p << " differ by " << report.spread << ")";
          report.message = os.str();
          return report;
        }
      }
    }
  }
  return report;
}

PredictabilityReport check_predictability(const DriftSpec& spec, const TreeModel& model,
                                          std::size_t cap) {
  const TreePaths tree = enumerate_tree(model, cap);
  DriftEvaluator ev(spec, model.grid());
  return check_predictability(
      [&ev](std::span<const double> values, std::size_t k) { return ev.eval(values, k); },
      tree);
}

}  // namespace wienerlab
