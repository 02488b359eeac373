#pragma once

// Log posterior of the semiparametric model f(y) = g_theta(y) psi(G_theta(y)),
// psi = L(omega) with omega a lambda-averaged predictive process on m knots,
// and of its two-parameter GPD-only reduction.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lgptail/gp_lowrank.hpp"
#include "lgptail/gpd.hpp"
#include "lgptail/grid_density.hpp"
#include "lgptail/priors.hpp"

namespace lgptail {

/// How the fitted values were derived from the raw records.
struct Provenance {
  double truncate_below = 0.0;
  double jitter_half_width = 0.0;
  double support_shift = 0.0;
  std::uint64_t seed = 0;
  std::size_t original_count = 0;  ///< N, records before truncation
};

class Dataset {
 public:
  /// Values must be finite and strictly positive. Stored sorted ascending.
  explicit Dataset(std::vector<double> values, Provenance provenance = {});

  std::span<const double> values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  const Provenance& provenance() const { return provenance_; }
  double median() const;
  /// n / N; 1 when the original count is unknown.
  double inclusion_fraction() const;

 private:
  std::vector<double> sorted_;
  Provenance provenance_;
};

/// Sampler state (zeta, tau = log sigma, omega at knots); packed as
/// [zeta, tau, omega_1, ..., omega_m] for the sampler.
struct ChainState {
  double zeta = 0.0;
  double tau = 0.0;
  std::vector<double> omega;

  Eigen::VectorXd pack() const;
  static ChainState unpack(const Eigen::VectorXd& x);
};

struct PosteriorParts {
  double log_likelihood = 0.0;
  double log_prior_theta = 0.0;
  double log_prior_omega = 0.0;

  double total() const { return log_likelihood + log_prior_theta + log_prior_omega; }
};

/// Values u_i = G_theta(y_i) are clamped to [kUClamp, 1 - kUClamp].
inline constexpr double kUClamp = 1e-12;

class SemiparametricModel {
 public:
  SemiparametricModel(std::shared_ptr<const Dataset> data,
                      std::shared_ptr<const LambdaGrid> lambda_grid,
                      std::shared_ptr<const Grid> grid, PriorConfig prior);

  std::size_t knot_count() const { return lambda_grid_->knot_count(); }
  std::size_t dim() const { return knot_count() + 2; }
  const Dataset& data() const { return *data_; }
  const LambdaGrid& lambda_grid() const { return *lambda_grid_; }
  std::shared_ptr<const Grid> grid() const { return grid_; }
  const PriorConfig& prior() const { return prior_; }

  ThetaParam theta(const ChainState& s) const;
  /// psi implied by knot values (predictive projection then logistic transform).
  GridDensity density(std::span<const double> omega_knots) const;

  /// Throws NumericalError naming the first observation whose contribution
  /// is not finite.
  double log_likelihood(const ChainState& s) const;
  PosteriorParts log_posterior_parts(const ChainState& s) const;
  double log_posterior(const ChainState& s) const { return log_posterior_parts(s).total(); }

  /// Number of u_i values clamped so far, summed over all evaluations
  /// (rejected proposals included).
  std::size_t clamp_count() const { return clamp_count_.load(); }
  /// Number of u_i that would be clamped at this state.
  std::size_t clamped_points(const ChainState& s) const;

  /// Log-posterior functor for one chain. Caches the theta-dependent and the
  /// omega-dependent parts of the last few states so a block update that
  /// leaves one part unchanged does not recompute it. Not thread-safe; make
  /// one per chain. Returns -inf for states with a non-finite value.
  class Target {
   public:
    explicit Target(const SemiparametricModel& model) : model_(&model) {}
    double operator()(const Eigen::VectorXd& x);

   private:
    struct ThetaSlot {
      double zeta = 0.0, tau = 0.0;
      std::vector<double> u;
      double log_g = 0.0;
      double log_prior = 0.0;
      bool valid = false;
    };
    struct OmegaSlot {
      std::vector<double> omega;
      std::optional<GridDensity> psi;
      double log_prior = 0.0;
    };
    const ThetaSlot& theta_slot(double zeta, double tau);
    const OmegaSlot& omega_slot(const Eigen::VectorXd& x);

    const SemiparametricModel* model_;
    ThetaSlot theta_[2];
    OmegaSlot omega_[2];
    int next_theta_ = 0, next_omega_ = 0;
  };

  Target make_target() const { return Target(*this); }

 private:
  // Fills u (ascending, clamped) and returns sum log g_theta(y_i).
  double transform_data(ThetaParam theta, std::vector<double>& u) const;

  std::shared_ptr<const Dataset> data_;
  std::shared_ptr<const LambdaGrid> lambda_grid_;
  std::shared_ptr<const Grid> grid_;
  PriorConfig prior_;
  mutable std::atomic<std::size_t> clamp_count_{0};
};

/// Two-parameter posterior: log prior of (zeta, tau) plus the GPD
/// log-likelihood of nonnegative values.
double gpd_only_log_posterior(double zeta, double tau, std::span<const double> values,
                              const PriorConfig& prior);

/// Starting state: alpha = 2 (zeta = 0), sigma = median(y), omega = 0.
/// Throws InputError when all observations are equal.
ChainState initialize(const Dataset& data, std::size_t knot_count);

}  // namespace lgptail
