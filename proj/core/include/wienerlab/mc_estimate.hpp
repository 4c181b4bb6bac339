#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace wienerlab {

/// Monte Carlo mean with its standard error (sample sd / sqrt(n)).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  [[nodiscard]] bool covers(double target, double n_sigma) const noexcept {
    return std::fabs(mean - target) <= n_sigma * std_error;
  }
};

/// Serial two-pass reduction; sample order fixes the result bit-for-bit.
inline McEstimate mc_from_samples(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("mc_from_samples: need at least 2 samples");
  }
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  McEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  e.n_samples = samples.size();
  return e;
}

}  // namespace wienerlab
