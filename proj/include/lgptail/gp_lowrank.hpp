#pragma once

// Squared-exponential kernel machinery for the low-rank logistic Gaussian
// process: knot sets, the discretized inverse length-scale prior with its
// precomputed projection and Cholesky factors, the kappa-marginalized
// Student-t prior on knot values, and the lambda-averaged predictive process.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgptail/grid_density.hpp"

namespace lgptail {

class KnotSet {
 public:
  /// m equally spaced knots including 0 and 1.
  static KnotSet uniform(std::size_t m);
  /// Sorted distinct knots spanning [0, 1] with both endpoints, or a single
  /// knot anywhere in [0, 1].
  explicit KnotSet(std::vector<double> knots);

  std::size_t size() const { return knots_.size(); }
  std::span<const double> points() const { return knots_; }
  double operator[](std::size_t i) const { return knots_[i]; }

 private:
  std::vector<double> knots_;
};

/// c_lambda(u, v) = exp(-lambda^2 (u - v)^2).
double sq_exp_kernel(double lambda, double u, double v);

/// Correlation at distance `distance` mapped to lambda and back.
double lambda_for_correlation(double rho, double distance = 0.1);
double correlation_for_lambda(double lambda, double distance = 0.1);

/// Kernel matrix between two point sets, `jitter` added to the diagonal when
/// the sets coincide (square).
Eigen::MatrixXd kernel_matrix(double lambda, std::span<const double> rows,
                              std::span<const double> cols, double jitter = 0.0);

/// KL(N(0, c0) || N(0, c1)). Throws NumericalError when either is not SPD.
double gauss_kl(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1);

struct GammaPrior {
  double shape = 16.0;
  double rate = 2.2;
};

struct LambdaGridOptions {
  double rho_start = 0.95;
  double rho_stop = 0.2;
  double kl_step = 0.5;
  double rho_distance = 0.1;
  /// Diagonal jitter on every knot covariance.
  double jitter = 1e-10;
};

/// Discrete approximation of the inverse length-scale prior with everything
/// the posterior needs precomputed per support point.
class LambdaGrid {
 public:
  struct Entry {
    double lambda = 0.0;
    double log_weight = 0.0;   // log prior probability of this support point
    Eigen::MatrixXd project;   // L x m, C_TS C_S^{-1}
    Eigen::MatrixXd chol;      // m x m lower Cholesky factor of C_S
    double log_det = 0.0;      // log |C_S|
  };

  /// KL-stepped support points from rho_start down to rho_stop. Each step
  /// halves the correlation gap to the previous point until the Gaussian KL
  /// divergence falls to kl_step or below.
  static LambdaGrid build(const KnotSet& knots, const Grid& grid, GammaPrior prior,
                          const LambdaGridOptions& options = {});
  /// Explicit support points and (unnormalized) prior weights.
  static LambdaGrid from_support(const KnotSet& knots, const Grid& grid,
                                 std::span<const double> lambdas,
                                 std::span<const double> weights, double jitter = 1e-10);

  std::size_t size() const { return entries_.size(); }
  std::size_t knot_count() const { return knots_.size(); }
  std::size_t grid_size() const { return grid_points_.size(); }
  const Entry& operator[](std::size_t g) const { return entries_[g]; }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const double> knots() const { return knots_; }
  std::span<const double> grid_points() const { return grid_points_; }
  std::vector<double> lambdas() const;

  /// Binary cache. `load` returns false when the file is missing or was built
  /// with different knots, grid, prior or options.
  void save(const std::filesystem::path& path) const;
  static bool load(const std::filesystem::path& path, const KnotSet& knots, const Grid& grid,
                   GammaPrior prior, const LambdaGridOptions& options, LambdaGrid& out);
  /// Builds, reading from and writing to `cache_dir` when it is non-empty.
  static LambdaGrid cached(const std::filesystem::path& cache_dir, const KnotSet& knots,
                           const Grid& grid, GammaPrior prior,
                           const LambdaGridOptions& options = {});
  static std::string cache_name(const KnotSet& knots, const Grid& grid, GammaPrior prior);

 private:
  std::vector<double> knots_;
  std::vector<double> grid_points_;
  GammaPrior prior_{};
  LambdaGridOptions options_{};
  std::vector<Entry> entries_;
};

/// Everything derived from knot values in one pass over the support points.
struct KnotFieldEval {
  double log_prior = 0.0;              // log of the lambda-mixture Student-t density
  std::vector<double> weights;         // posterior mixture weights over lambda
  Eigen::VectorXd omega_grid;          // predictive-process values on the grid
};

KnotFieldEval evaluate_knot_field(std::span<const double> omega_knots, const LambdaGrid& grid,
                                  double a_kappa, double b_kappa);

double marginal_log_prior(std::span<const double> omega_knots, const LambdaGrid& grid,
                          double a_kappa, double b_kappa);
std::vector<double> mixture_weights(std::span<const double> omega_knots, const LambdaGrid& grid,
                                    double a_kappa, double b_kappa);
std::vector<double> predictive_project(std::span<const double> omega_knots,
                                       const LambdaGrid& grid, double a_kappa, double b_kappa);

}  // namespace lgptail
