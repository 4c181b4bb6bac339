#include "wienerlab/time_grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wienerlab {

TimeGrid::TimeGrid(std::vector<double> points, GridKind kind)
    : points_(std::move(points)), kind_(kind) {
  if (points_.size() < 2) {
    throw std::invalid_argument("TimeGrid: need at least one step");
  }
  if (points_.front() != 0.0) {
    throw std::invalid_argument("TimeGrid: first point must be 0");
  }
  if (points_.back() != 1.0) {
    throw std::invalid_argument("TimeGrid: last point must be 1");
  }
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    if (!(points_[i] < points_[i + 1])) {
      throw std::invalid_argument("TimeGrid: points must be strictly increasing");
    }
  }
}

std::size_t TimeGrid::index_of(double time, double tol) const noexcept {
  // Grids are tiny relative to everything else; linear scan is fine.
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::fabs(points_[i] - time) <= tol) return i;
  }
  return npos;
}

bool TimeGrid::same_points_as(const TimeGrid& other) const noexcept {
  return points_ == other.points_;
}

std::string TimeGrid::summary() const {
  std::ostringstream os;
  switch (kind_) {
    case GridKind::Uniform:
      os << "uniform(n=" << steps() << ")";
      break;
    case GridKind::Geometric:
      os << "geometric(ratio=" << ratio << ",k_max=" << k_max
         << ",refine=" << refine << ",n=" << steps() << ")";
      break;
    case GridKind::Explicit:
      os << "explicit(n=" << steps() << ")";
      break;
  }
  return os.str();
}

GridPtr make_uniform_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("make_uniform_grid: n must be >= 1");
  std::vector<double> pts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    pts[i] = static_cast<double>(i) / static_cast<double>(n);
  }
  pts.back() = 1.0;
  return std::make_shared<TimeGrid>(std::move(pts), GridKind::Uniform);
}

GridPtr make_geometric_grid(double ratio, int k_max, int refine) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("make_geometric_grid: ratio must be in (0,1)");
  }
  if (k_max < 1) throw std::invalid_argument("make_geometric_grid: k_max must be >= 1");
  if (refine < 1) throw std::invalid_argument("make_geometric_grid: refine must be >= 1");

  std::vector<double> breakpoints;
  breakpoints.push_back(0.0);
  for (int k = k_max; k >= 0; --k) {
    breakpoints.push_back(std::pow(ratio, k));
  }
  std::vector<double> pts;
  pts.push_back(0.0);
  for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
    const double lo = breakpoints[b];
    const double hi = breakpoints[b + 1];
    for (int j = 1; j <= refine; ++j) {
      pts.push_back(j == refine ? hi : lo + (hi - lo) * j / refine);
    }
  }
  auto grid = std::make_shared<TimeGrid>(std::move(pts), GridKind::Geometric);
  grid->ratio = ratio;
  grid->k_max = k_max;
  grid->refine = refine;
  return grid;
}

GridPtr make_explicit_grid(std::vector<double> points) {
  return std::make_shared<TimeGrid>(std::move(points), GridKind::Explicit);
}

}  // namespace wienerlab
