#pragma once

// Grid representation of a density psi on [0, 1]: psi is the normalized
// piecewise-linear interpolant of exp(omega) over a fixed grid, so the
// trapezoid rule integrates it exactly.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace lgptail {

class Grid {
 public:
  /// L equally spaced points with endpoints exactly 0 and 1.
  static Grid uniform(std::size_t size);
  /// Arbitrary strictly increasing points starting at 0 and ending at 1.
  explicit Grid(std::vector<double> points);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const { return points_; }

  /// Index l of the cell [t_l, t_{l+1}] containing u (last cell for u = 1).
  std::size_t cell(double u) const;

 private:
  std::vector<double> points_;
};

class GridDensity {
 public:
  /// Logistic transform: h = exp(omega - max omega), normalized by the
  /// trapezoid integral of h. Non-finite omega throws NumericalError.
  static GridDensity from_log_values(std::span<const double> omega,
                                     std::shared_ptr<const Grid> grid);
  /// Uniform density on the grid.
  static GridDensity uniform(std::shared_ptr<const Grid> grid);

  const Grid& grid() const { return *grid_; }

  /// psi at the grid points.
  std::vector<double> values() const;
  std::vector<double> log_values() const;

  double eval(double u) const;
  double log_eval(double u) const;
  /// Sum of log psi(u_i) over ascending u, one forward merge pass.
  double sum_log_sorted(std::span<const double> u_ascending) const;

  double cdf(double u) const;
  /// 1 - cdf(u), accumulated from the right end.
  double survival(double u) const;
  double quantile(double q) const;

  /// u with survival(u) = p, returned as 1 - u to keep precision near 1.
  double upper_quantile_complement(double p) const;
  double upper_quantile(double p) const { return 1.0 - upper_quantile_complement(p); }

  /// Survival at u = 1 - v, with v given directly.
  double survival_from_complement(double v) const;

  /// Trapezoid integral of the unnormalized h (after the max shift).
  double norm() const { return norm_; }
  double log_shift() const { return shift_; }

 private:
  GridDensity(std::shared_ptr<const Grid> grid, std::vector<double> h, double shift);

  double interpolate_h(std::size_t cell, double u) const;

  std::shared_ptr<const Grid> grid_;
  std::vector<double> h_;          // exp(omega - shift)
  std::vector<double> cell_mass_;  // normalized mass per cell
  std::vector<double> cum_left_;   // mass of cells left of l
  std::vector<double> cum_right_;  // mass of cells l and to its right
  double shift_ = 0.0;
  double norm_ = 1.0;
};

}  // namespace lgptail
