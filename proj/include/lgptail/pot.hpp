#pragma once

// Peaks-over-threshold baseline: Bayesian GPD fit to the excesses over a
// fixed threshold, under the same prior on (alpha, sigma) as the
// semiparametric model.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lgptail/gpd.hpp"
#include "lgptail/priors.hpp"
#include "lgptail/sampler.hpp"
#include "lgptail/summaries.hpp"

namespace lgptail {

inline constexpr std::size_t kDefaultMinExceedances = 30;

struct PotFit {
  double threshold = 0.0;
  std::size_t exceedances = 0;     ///< k
  std::size_t sample_size = 0;     ///< n
  double exceed_fraction = 0.0;    ///< k / n
  PosteriorDraws chain;            ///< draws of (zeta, tau)
  std::vector<ThetaParam> thetas;  ///< the same draws as (alpha, sigma)

  std::vector<double> xi() const;
};

/// Throws InputError when fewer than `min_exceedances` values exceed the
/// threshold (including none at all).
PotFit fit_pot(std::span<const double> values, double threshold, const PriorConfig& prior,
               const SamplerConfig& config,
               std::size_t min_exceedances = kDefaultMinExceedances);

/// t + alpha sigma ((p / zeta_t)^{-1/alpha} - 1); requires 0 < p <= zeta_t.
double pot_tail_quantile(ThetaParam theta, double threshold, double exceed_fraction, double p);
std::vector<double> pot_tail_quantile_draws(const PotFit& fit, double p);
std::vector<QuantileReport> pot_quantile_report(const PotFit& fit, std::span<const double> p_list);

struct XiCurvePoint {
  double threshold = 0.0;
  std::size_t exceedances = 0;
  bool fitted = false;      ///< false marks a gap (too few exceedances)
  IntervalSummary xi{};
};

/// Evenly spaced thresholds from `from` to `to` inclusive (within rounding).
std::vector<double> threshold_grid(double from = 0.005, double to = 3.0, double step = 0.025);

/// fit_pot over every threshold; thresholds below the exceedance floor are
/// recorded as gaps. Each threshold gets its own derived seed.
std::vector<XiCurvePoint> pot_xi_curve(std::span<const double> values,
                                       std::span<const double> thresholds,
                                       const PriorConfig& prior, const SamplerConfig& config,
                                       std::size_t min_exceedances = kDefaultMinExceedances,
                                       std::size_t threads = 1);

}  // namespace lgptail
