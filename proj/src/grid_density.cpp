#include "lgptail/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgptail/error.hpp"

namespace lgptail {

Grid Grid::uniform(std::size_t size) {
  if (size < 2) throw DomainError("grid needs at least two points");
  std::vector<double> pts(size);
  const double n = static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) pts[i] = static_cast<double>(i) / n;
  pts.front() = 0.0;
  pts.back() = 1.0;
  return Grid(std::move(pts));
}

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("grid needs at least two points");
  if (points_.front() != 0.0 || points_.back() != 1.0) {
    throw DomainError("grid endpoints must be exactly 0 and 1");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw DomainError("grid points must be strictly increasing");
  }
}

std::size_t Grid::cell(double u) const {
  const auto it = std::upper_bound(points_.begin(), points_.end(), u);
  const auto idx = static_cast<std::size_t>(it - points_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, points_.size() - 2);
}

GridDensity::GridDensity(std::shared_ptr<const Grid> grid, std::vector<double> h, double shift)
    : grid_(std::move(grid)), h_(std::move(h)), shift_(shift) {
  const Grid& t = *grid_;
  const std::size_t cells = t.size() - 1;
  cell_mass_.resize(cells);
  norm_ = 0.0;
  for (std::size_t l = 0; l < cells; ++l) {
    cell_mass_[l] = 0.5 * (t[l + 1] - t[l]) * (h_[l] + h_[l + 1]);
    norm_ += cell_mass_[l];
  }
  for (auto& m : cell_mass_) m /= norm_;
  cum_left_.assign(cells + 1, 0.0);
  for (std::size_t l = 0; l < cells; ++l) cum_left_[l + 1] = cum_left_[l] + cell_mass_[l];
  cum_right_.assign(cells + 1, 0.0);
  for (std::size_t l = cells; l-- > 0;) cum_right_[l] = cum_right_[l + 1] + cell_mass_[l];
}

GridDensity GridDensity::from_log_values(std::span<const double> omega,
                                         std::shared_ptr<const Grid> grid) {
  if (!grid) throw DomainError("null grid");
  if (omega.size() != grid->size()) {
    throw DomainError("omega has " + std::to_string(omega.size()) + " values for a grid of " +
                      std::to_string(grid->size()));
  }
  double shift = -HUGE_VAL;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i])) {
      throw NumericalError("non-finite omega at grid index " + std::to_string(i));
    }
    shift = std::max(shift, omega[i]);
  }
  std::vector<double> h(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) h[i] = std::exp(omega[i] - shift);
  return GridDensity(std::move(grid), std::move(h), shift);
}

GridDensity GridDensity::uniform(std::shared_ptr<const Grid> grid) {
  std::vector<double> zeros(grid->size(), 0.0);
  return from_log_values(zeros, std::move(grid));
}

std::vector<double> GridDensity::values() const {
  std::vector<double> out(h_.size());
  for (std::size_t i = 0; i < h_.size(); ++i) out[i] = h_[i] / norm_;
  return out;
}

std::vector<double> GridDensity::log_values() const {
  std::vector<double> out(h_.size());
  const double log_norm = std::log(norm_);
  for (std::size_t i = 0; i < h_.size(); ++i) out[i] = std::log(h_[i]) - log_norm;
  return out;
}

double GridDensity::interpolate_h(std::size_t l, double u) const {
  const Grid& t = *grid_;
  const double w = (u - t[l]) / (t[l + 1] - t[l]);
  if (w <= 0.0) return h_[l];
  if (w >= 1.0) return h_[l + 1];
  return h_[l] + (h_[l + 1] - h_[l]) * w;
}

namespace {
void check_unit(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError(std::string(what) + " requires an argument in [0, 1]");
}
}  // namespace

double GridDensity::eval(double u) const {
  check_unit(u, "eval");
  return interpolate_h(grid_->cell(u), u) / norm_;
}

double GridDensity::log_eval(double u) const {
  check_unit(u, "log_eval");
  return std::log(interpolate_h(grid_->cell(u), u)) - std::log(norm_);
}

double GridDensity::sum_log_sorted(std::span<const double> u) const {
  const Grid& t = *grid_;
  const std::size_t last_cell = t.size() - 2;
  std::size_t l = 0;
  double acc = 0.0;
  for (const double ui : u) {
    check_unit(ui, "sum_log_sorted");
    while (l < last_cell && ui > t[l + 1]) ++l;
    acc += std::log(interpolate_h(l, ui));
  }
  return acc - static_cast<double>(u.size()) * std::log(norm_);
}

double GridDensity::cdf(double u) const {
  check_unit(u, "cdf");
  if (u == 1.0) return 1.0;
  const Grid& t = *grid_;
  const std::size_t l = grid_->cell(u);
  const double width = t[l + 1] - t[l];
  const double x = u - t[l];
  const double slope = (h_[l + 1] - h_[l]) / width;
  const double partial = (h_[l] * x + 0.5 * slope * x * x) / norm_;
  return std::min(1.0, cum_left_[l] + partial);
}

double GridDensity::survival(double u) const {
  check_unit(u, "survival");
  return survival_from_complement(1.0 - u);
}

double GridDensity::survival_from_complement(double v) const {
  check_unit(v, "survival_from_complement");
  if (v == 0.0) return 0.0;
  const Grid& t = *grid_;
  const std::size_t l = grid_->cell(1.0 - v);
  const double width = t[l + 1] - t[l];
  const double xr = std::clamp(v - (1.0 - t[l + 1]), 0.0, width);
  const double slope = (h_[l + 1] - h_[l]) / width;
  const double partial = (h_[l + 1] * xr - 0.5 * slope * xr * xr) / norm_;
  return std::min(1.0, cum_right_[l + 1] + partial);
}

double GridDensity::quantile(double q) const {
  check_unit(q, "quantile");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  const Grid& t = *grid_;
  const std::size_t cells = t.size() - 1;
  auto it = std::upper_bound(cum_left_.begin(), cum_left_.begin() + static_cast<long>(cells), q);
  const std::size_t l = static_cast<std::size_t>(it - cum_left_.begin()) - 1;
  const double width = t[l + 1] - t[l];
  const double slope = (h_[l + 1] - h_[l]) / width;
  const double r = (q - cum_left_[l]) * norm_;
  // Root of slope/2 x^2 + h_l x - r = 0 in the form free of cancellation;
  // the discriminant equals h(u)^2 >= 0 up to rounding.
  const double disc = std::max(0.0, h_[l] * h_[l] + 2.0 * slope * r);
  const double x = 2.0 * r / (h_[l] + std::sqrt(disc));
  return std::clamp(t[l] + x, t[l], t[l + 1]);
}

double GridDensity::upper_quantile_complement(double p) const {
  check_unit(p, "upper_quantile");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const Grid& t = *grid_;
  const std::size_t cells = t.size() - 1;
  // cum_right_ is nonincreasing; find cell l with cum_right_[l+1] <= p < cum_right_[l].
  std::size_t l = cells - 1;
  {
    std::size_t lo = 0, hi = cells - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum_right_[mid + 1] <= p) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    l = lo;
  }
  const double width = t[l + 1] - t[l];
  const double slope = (h_[l + 1] - h_[l]) / width;
  const double r = (p - cum_right_[l + 1]) * norm_;
  const double disc = std::max(0.0, h_[l + 1] * h_[l + 1] - 2.0 * slope * r);
  const double xr = std::clamp(2.0 * r / (h_[l + 1] + std::sqrt(disc)), 0.0, width);
  return (1.0 - t[l + 1]) + xr;
}

}  // namespace lgptail
