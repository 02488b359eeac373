#pragma once

// Posterior summaries: extreme value index, high tail quantiles, density
// curves and return periods, each reduced to a point estimate and an
// equal-tailed credible interval over the retained draws.

#include <span>
#include <vector>

#include "lgptail/model.hpp"
#include "lgptail/sampler.hpp"

namespace lgptail {

struct IntervalSummary {
  double mean = 0.0;
  double median = 0.0;
  double lower = 0.0;  ///< 2.5% point for the default level
  double upper = 0.0;  ///< 97.5% point for the default level
};

/// Empirical moments and equal-tailed interval (linear interpolation between
/// order statistics). Throws DomainError on empty input.
IntervalSummary summarize(std::span<const double> values, double level = 0.95);

/// Empirical quantile with linear interpolation, prob in [0, 1].
double empirical_quantile(std::span<const double> sorted_values, double prob);

/// One posterior draw turned into a density on (shift, inf).
struct FittedDensity {
  ThetaParam theta;
  GridDensity psi;
  double shift = 0.0;

  double pdf(double y) const;
  /// 1 - F(y); 1 at or below the shift.
  double survival(double y) const;
  /// Qbar(p) = F^{-1}(1 - p) = shift + G^{-1}(Psi^{-1}(1 - p)).
  double tail_quantile(double p) const;
};

std::vector<FittedDensity> fitted_densities(const PosteriorDraws& draws,
                                            const SemiparametricModel& model);
FittedDensity fitted_density(const ChainState& state, const SemiparametricModel& model);
/// Same, without a data set: for draws reloaded from disk.
FittedDensity fitted_density(const ChainState& state, const LambdaGrid& lambda_grid,
                             std::shared_ptr<const Grid> grid, const PriorConfig& prior,
                             double shift);

/// Per-draw xi = 1 / alpha from the zeta column.
std::vector<double> xi_draws(const PosteriorDraws& draws, double alpha_min);
/// Mean is the point estimate of xi; interval is equal-tailed.
IntervalSummary xi_summary(const PosteriorDraws& draws, double alpha_min);

struct QuantileReport {
  double p = 0.0;
  double estimate = 0.0;  ///< posterior median
  double mean = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
};

std::vector<QuantileReport> quantile_report(std::span<const FittedDensity> fits,
                                            std::span<const double> p_list);

struct DensityBand {
  double y = 0.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

std::vector<DensityBand> density_curve(std::span<const FittedDensity> fits,
                                       std::span<const double> y_grid);

struct ReturnPeriod {
  double level = 0.0;
  double estimate = 0.0;  ///< posterior median, years
  double mean = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
};

/// Per draw 1 / (records_per_year * inclusion_fraction * Fbar(level)).
/// level must exceed the support shift and inclusion_fraction lie in (0, 1].
std::vector<double> return_period_draws(std::span<const FittedDensity> fits, double level,
                                        double records_per_year, double inclusion_fraction);
ReturnPeriod return_period(std::span<const FittedDensity> fits, double level,
                           double records_per_year, double inclusion_fraction);

}  // namespace lgptail
