#pragma once

// Adaptive blocked random-walk Metropolis. Each block proposes
// x_b' ~ N(x_b, s_b^2 Sigma_b) where Sigma_b is the block's running empirical
// covariance and log s_b is driven toward a target acceptance rate
// (global adaptive scaling with running moments, step gamma_t = (t+t0)^-decay).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgptail/model.hpp"

namespace lgptail {

struct SamplerConfig {
  std::size_t n_iter = 50000;
  /// Defaults to n_iter / 5.
  std::optional<std::size_t> burn_in;
  std::size_t thin = 10;
  double target_accept = 0.15;
  double adapt_decay = 0.6;
  /// Offset t0 in the adaptation step size.
  double adapt_offset = 100.0;
  /// Initial proposal covariance is init_scale^2 I (times 2.38^2 / d via s_b).
  double init_scale = 0.1;
  double cov_regularization = 1e-6;
  bool adapt = true;
  std::uint64_t seed = 1;

  std::size_t burn_in_iters() const { return burn_in.value_or(n_iter / 5); }
  std::size_t retained() const;
  /// Throws InputError on inconsistent settings.
  void validate() const;
};

struct Block {
  std::string name;
  std::vector<Eigen::Index> indices;
};

struct BlockStats {
  std::string name;
  std::size_t proposed = 0;   // after burn-in
  std::size_t accepted = 0;   // after burn-in
  double acceptance() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  /// log s_b recorded at every retained draw.
  std::vector<double> log_scale_trace;
};

struct PosteriorDraws {
  std::vector<std::string> columns;  // names of the state coordinates
  Eigen::MatrixXd draws;             // one retained state per row
  std::vector<double> log_post;
  std::vector<BlockStats> blocks;

  std::size_t rows() const { return static_cast<std::size_t>(draws.rows()); }
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

/// Runs the chain. The initial log density must be finite (NumericalError
/// otherwise); proposals with a non-finite log density are rejected.
PosteriorDraws run_adaptive_metropolis(const LogDensity& target, const Eigen::VectorXd& init,
                                       const std::vector<Block>& blocks,
                                       const SamplerConfig& config,
                                       std::vector<std::string> columns = {});

/// The three-block scheme: {omega_S}, {zeta, tau}, {all}.
std::vector<Block> semiparametric_blocks(std::size_t knot_count);

/// Column names zeta, tau, omega_1..omega_m.
std::vector<std::string> semiparametric_columns(std::size_t knot_count);

/// Semiparametric chain from `init` (or the default initial state).
PosteriorDraws run_chain(const SamplerConfig& config, const SemiparametricModel& model,
                         std::optional<ChainState> init = std::nullopt);

/// Two-parameter GPD-only chain over (zeta, tau), single theta block.
PosteriorDraws run_gpd_chain(const SamplerConfig& config, std::span<const double> values,
                             const PriorConfig& prior, double init_tau);

/// Batch-means Monte Carlo standard error of the mean of a trace.
double batch_means_se(std::span<const double> trace, std::size_t batches = 25);

}  // namespace lgptail
