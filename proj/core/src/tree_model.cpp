#include "wienerlab/tree_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wienerlab {

namespace {

// Probabilists' Hermite He_k(x) via the three-term recurrence.
double hermite_he(int k, double x) {
  double h0 = 1.0, h1 = x;
  if (k == 0) return h0;
  for (int j = 1; j < k; ++j) {
    const double next = x * h1 - static_cast<double>(j) * h0;
    h0 = h1;
    h1 = next;
  }
  return h1;
}

}  // namespace

GaussHermiteRule gauss_hermite_rule(int m) {
  if (m < 2 || m > 32) {
    throw std::invalid_argument("gauss_hermite_rule: m must be in [2, 32]");
  }
  // Roots of He_k interlace the roots of He_{k-1}, so building the root
  // set degree by degree brackets every root for plain bisection.
  const double outer = 2.0 * std::sqrt(static_cast<double>(m)) + 2.0;
  std::vector<double> roots = {0.0};  // He_1
  for (int k = 2; k <= m; ++k) {
    std::vector<double> brackets;
    brackets.reserve(roots.size() + 2);
    brackets.push_back(-outer);
    brackets.insert(brackets.end(), roots.begin(), roots.end());
    brackets.push_back(outer);
    std::vector<double> next;
    next.reserve(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i + 1 < brackets.size(); ++i) {
      double a = brackets[i], b = brackets[i + 1];
      double fa = hermite_he(k, a);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = hermite_he(k, mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
        if (b - a < 1e-16 * (1.0 + std::fabs(a))) break;
      }
      next.push_back(0.5 * (a + b));
    }
    roots = std::move(next);
  }

  // Weights for the standard normal: p_i = (m-1)! / (m He_{m-1}(x_i)^2),
  // computed in log space.
  double lognorm = 0.0;  // log (m-1)!
  for (int k = 2; k < m; ++k) lognorm += std::log(static_cast<double>(k));

  GaussHermiteRule rule;
  rule.nodes = roots;
  rule.weights.resize(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double hm1 = hermite_he(m - 1, roots[i]);
    rule.weights[i] = std::exp(lognorm - std::log(static_cast<double>(m)) -
                               2.0 * std::log(std::fabs(hm1)));
  }

  // Symmetrize and renormalize to kill residual round-off.
  for (std::size_t i = 0; i < roots.size() / 2; ++i) {
    const std::size_t j = roots.size() - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = rule.weights[j] = w;
  }
  if (m % 2 == 1) rule.nodes[roots.size() / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

TreeModel::TreeModel(GridPtr grid, Branching branching, int factor)
    : grid_(std::move(grid)), branching_(branching), factor_(factor) {
  const std::size_t n = grid_->steps();
  atoms_.resize(n);
  probs_.resize(n);
}

TreeModel TreeModel::rademacher(GridPtr grid) {
  TreeModel m(std::move(grid), Branching::Rademacher, 2);
  for (std::size_t k = 0; k < m.steps(); ++k) {
    const double s = std::sqrt(m.grid_->dt(k));
    m.atoms_[k] = {-s, s};
    m.probs_[k] = {0.5, 0.5};
  }
  return m;
}

TreeModel TreeModel::gauss_hermite(GridPtr grid, int nodes) {
  const auto rule = gauss_hermite_rule(nodes);
  TreeModel m(std::move(grid), Branching::GaussHermite, nodes);
  for (std::size_t k = 0; k < m.steps(); ++k) {
    const double s = std::sqrt(m.grid_->dt(k));
    m.atoms_[k].resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      m.atoms_[k][i] = s * rule.nodes[i];
    }
    m.probs_[k] = rule.weights;
  }
  return m;
}

std::size_t TreeModel::path_count() const noexcept {
  std::size_t total = 1;
  for (std::size_t k = 0; k < steps(); ++k) {
    const auto f = static_cast<std::size_t>(factor_);
    if (total > std::numeric_limits<std::size_t>::max() / f) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= f;
  }
  return total;
}

TreePaths enumerate_tree(const TreeModel& model, std::size_t cap) {
  const std::size_t total = model.path_count();
  if (total > cap) {
    throw std::length_error("enumerate_tree: path count exceeds cap");
  }
  const std::size_t n = model.steps();
  const std::size_t f = static_cast<std::size_t>(model.factor());

  TreePaths out;
  out.paths.grid = model.grid();
  out.paths.dim = 1;
  out.paths.count = total;
  out.paths.values.resize(total * (n + 1));
  out.weights.assign(total, 1.0);
  out.factor = model.factor();

  // Mixed-radix: digit k of path index selects the step-k atom, most
  // significant digit first so siblings share prefixes contiguously.
  for (std::size_t p = 0; p < total; ++p) {
    double* row = out.paths.values.data() + p * (n + 1);
    row[0] = 0.0;
    std::size_t rem = p;
    std::size_t scale = total / f;
    double weight = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t digit = rem / scale;
      rem %= scale;
      if (k + 1 < n) scale /= f;
      row[k + 1] = row[k] + model.atoms(k)[digit];
      weight *= model.probabilities(k)[digit];
    }
    out.weights[p] = weight;
  }
  return out;
}

}  // namespace wienerlab
