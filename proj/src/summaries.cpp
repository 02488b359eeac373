#include "lgptail/summaries.hpp"

#include <algorithm>
#include <cmath>

#include "lgptail/error.hpp"

namespace lgptail {

double empirical_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile probability outside [0, 1]");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

IntervalSummary summarize(std::span<const double> values, double level) {
  if (values.empty()) throw DomainError("cannot summarize an empty sample");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  IntervalSummary s;
  // Centered at the first value so constant samples give their value exactly.
  const double ref = sorted.front();
  double dev = 0.0;
  for (double v : sorted) dev += v - ref;
  s.mean = ref + dev / static_cast<double>(sorted.size());
  s.median = empirical_quantile(sorted, 0.5);
  const double tail = 0.5 * (1.0 - level);
  s.lower = empirical_quantile(sorted, tail);
  s.upper = empirical_quantile(sorted, 1.0 - tail);
  return s;
}

double FittedDensity::pdf(double y) const {
  const double x = y - shift;
  if (!(x > 0.0)) return 0.0;
  const double v = gpd_survival(theta, x);
  const double u = std::clamp(1.0 - v, 0.0, 1.0);
  return gpd_pdf(theta, x) * psi.eval(u);
}

double FittedDensity::survival(double y) const {
  const double x = y - shift;
  if (!(x > 0.0)) return 1.0;
  return psi.survival_from_complement(std::clamp(gpd_survival(theta, x), 0.0, 1.0));
}

double FittedDensity::tail_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tail quantile requires p in (0, 1)");
  if (p < kQuantileClamp) throw DomainError("tail probability underflows the quantile clamp");
  const double v = psi.upper_quantile_complement(p);
  if (!(v >= kQuantileClamp)) {
    throw DomainError("tail probability maps below the quantile clamp of the parametric part");
  }
  return shift + gpd_upper_quantile(theta, v);
}

FittedDensity fitted_density(const ChainState& state, const SemiparametricModel& model) {
  return {model.theta(state), model.density(state.omega), model.data().provenance().support_shift};
}

FittedDensity fitted_density(const ChainState& state, const LambdaGrid& lambda_grid,
                             std::shared_ptr<const Grid> grid, const PriorConfig& prior,
                             double shift) {
  const auto field = evaluate_knot_field(state.omega, lambda_grid, prior.a_kappa, prior.b_kappa);
  const std::span<const double> omega(field.omega_grid.data(),
                                      static_cast<std::size_t>(field.omega_grid.size()));
  return {theta_from_coords(state.zeta, state.tau, prior.alpha_min),
          GridDensity::from_log_values(omega, std::move(grid)), shift};
}

std::vector<FittedDensity> fitted_densities(const PosteriorDraws& draws,
                                            const SemiparametricModel& model) {
  std::vector<FittedDensity> out;
  out.reserve(draws.rows());
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    const Eigen::VectorXd x = draws.draws.row(r).transpose();
    out.push_back(fitted_density(ChainState::unpack(x), model));
  }
  return out;
}

std::vector<double> xi_draws(const PosteriorDraws& draws, double alpha_min) {
  std::vector<double> xi(draws.rows());
  for (std::size_t r = 0; r < xi.size(); ++r) {
    xi[r] = 1.0 / alpha_from_zeta(draws.draws(static_cast<Eigen::Index>(r), 0), alpha_min);
  }
  return xi;
}

IntervalSummary xi_summary(const PosteriorDraws& draws, double alpha_min) {
  return summarize(xi_draws(draws, alpha_min));
}

std::vector<QuantileReport> quantile_report(std::span<const FittedDensity> fits,
                                            std::span<const double> p_list) {
  std::vector<QuantileReport> out;
  std::vector<double> q(fits.size());
  for (double p : p_list) {
    for (std::size_t i = 0; i < fits.size(); ++i) q[i] = fits[i].tail_quantile(p);
    const auto s = summarize(q);
    out.push_back({p, s.median, s.mean, s.lower, s.upper});
  }
  return out;
}

std::vector<DensityBand> density_curve(std::span<const FittedDensity> fits,
                                       std::span<const double> y_grid) {
  std::vector<DensityBand> out;
  std::vector<double> f(fits.size());
  for (double y : y_grid) {
    for (std::size_t i = 0; i < fits.size(); ++i) f[i] = fits[i].pdf(y);
    const auto s = summarize(f);
    out.push_back({y, s.mean, s.lower, s.upper});
  }
  return out;
}

std::vector<double> return_period_draws(std::span<const FittedDensity> fits, double level,
                                        double records_per_year, double inclusion_fraction) {
  if (!(inclusion_fraction > 0.0 && inclusion_fraction <= 1.0)) {
    throw DomainError("inclusion fraction must lie in (0, 1]");
  }
  if (!(records_per_year > 0.0)) throw DomainError("records_per_year must be positive");
  std::vector<double> rp(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!(level > fits[i].shift)) throw DomainError("return level must exceed the support shift");
    rp[i] = 1.0 / (records_per_year * inclusion_fraction * fits[i].survival(level));
  }
  return rp;
}

ReturnPeriod return_period(std::span<const FittedDensity> fits, double level,
                           double records_per_year, double inclusion_fraction) {
  const auto s = summarize(return_period_draws(fits, level, records_per_year, inclusion_fraction));
  return {level, s.median, s.mean, s.lower, s.upper};
}

}  // namespace lgptail
