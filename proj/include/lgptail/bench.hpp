#pragma once

// Wall-clock measurements behind the complexity claims: one log-posterior
// evaluation as n, m or L grow, and whole chains as n grows.

#include <cstddef>
#include <cstdint>
#include <memory>

#include "lgptail/gp_lowrank.hpp"
#include "lgptail/grid_density.hpp"
#include "lgptail/priors.hpp"

namespace lgptail {

struct EvalTiming {
  std::size_t n = 0;
  std::size_t knots = 0;
  std::size_t grid_size = 0;
  std::size_t support = 0;      ///< lambda support points G
  double seconds_per_eval = 0.0;
};

/// Best of `rounds` batches, each lasting at least `min_seconds`, of
/// log-posterior evaluations at varying states on n GPD(2, 1) draws.
EvalTiming time_log_posterior(std::shared_ptr<const LambdaGrid> lambda_grid,
                              std::shared_ptr<const Grid> grid, std::size_t n,
                              const PriorConfig& prior, std::uint64_t seed,
                              double min_seconds = 0.2, int rounds = 3);

struct ChainTiming {
  std::size_t n = 0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

/// Wall time of one semiparametric chain on n GPD(2, 1) draws.
ChainTiming time_chain(std::shared_ptr<const LambdaGrid> lambda_grid,
                       std::shared_ptr<const Grid> grid, std::size_t n, std::size_t n_iter,
                       const PriorConfig& prior, std::uint64_t seed);

}  // namespace lgptail
