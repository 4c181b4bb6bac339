#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace wienerlab {

enum class GridKind { Uniform, Geometric, Explicit };

/// Partition of the unit horizon: t_0 = 0 < t_1 < ... < t_n = 1.
///
/// Geometric grids are built from the breakpoints b_k = ratio^k for
/// k = k_max..0, each block optionally subdivided into `refine` equal
/// sub-steps. They carry (ratio, k_max) so block-structured drifts can
/// locate their breakpoints without re-deriving them from the points.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> points, GridKind kind);

  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
  [[nodiscard]] GridKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t steps() const noexcept { return points_.size() - 1; }
  [[nodiscard]] double t(std::size_t i) const { return points_[i]; }
  [[nodiscard]] double dt(std::size_t k) const { return points_[k + 1] - points_[k]; }

  /// Index of the grid point equal to `time` (within `tol`), or npos.
  [[nodiscard]] std::size_t index_of(double time, double tol = 1e-12) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  [[nodiscard]] bool same_points_as(const TimeGrid& other) const noexcept;
  [[nodiscard]] std::string summary() const;

  // Set for geometric grids only.
  double ratio = 0.0;
  int k_max = 0;
  int refine = 1;

 private:
  std::vector<double> points_;
  GridKind kind_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Uniform partition with n steps.
GridPtr make_uniform_grid(std::size_t n);

/// Breakpoints {0} U {ratio^k : k = k_max..0}, each block split into
/// `refine` equal sub-steps. ratio must lie in (0,1), k_max >= 1.
GridPtr make_geometric_grid(double ratio, int k_max, int refine = 1);

/// Explicit strictly increasing points from 0 to 1.
GridPtr make_explicit_grid(std::vector<double> points);

}  // namespace wienerlab
