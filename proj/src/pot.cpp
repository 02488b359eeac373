#include "lgptail/pot.hpp"

#include <algorithm>
#include <cmath>

#include "lgptail/error.hpp"
#include "lgptail/parallel.hpp"

namespace lgptail {

std::vector<double> PotFit::xi() const {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (const auto& th : thetas) out.push_back(th.xi());
  return out;
}

namespace {

std::vector<double> excesses(std::span<const double> values, double threshold) {
  std::vector<double> z;
  for (double y : values) {
    if (y > threshold) z.push_back(y - threshold);
  }
  return z;
}

}  // namespace

PotFit fit_pot(std::span<const double> values, double threshold, const PriorConfig& prior,
               const SamplerConfig& config, std::size_t min_exceedances) {
  prior.validate();
  if (values.empty()) throw InputError("no data for the threshold fit");
  std::vector<double> z = excesses(values, threshold);
  if (z.size() < std::max<std::size_t>(min_exceedances, 1)) {
    throw InputError("threshold " + std::to_string(threshold) + " leaves " +
                     std::to_string(z.size()) + " exceedances, need at least " +
                     std::to_string(std::max<std::size_t>(min_exceedances, 1)));
  }
  std::sort(z.begin(), z.end());
  const double median = z[z.size() / 2];
  const double init_tau = std::log(median > 0.0 ? median : z.back());

  PotFit fit;
  fit.threshold = threshold;
  fit.exceedances = z.size();
  fit.sample_size = values.size();
  fit.exceed_fraction = static_cast<double>(z.size()) / static_cast<double>(values.size());
  fit.chain = run_gpd_chain(config, z, prior, init_tau);
  fit.thetas.reserve(fit.chain.rows());
  for (Eigen::Index r = 0; r < fit.chain.draws.rows(); ++r) {
    fit.thetas.push_back(
        theta_from_coords(fit.chain.draws(r, 0), fit.chain.draws(r, 1), prior.alpha_min));
  }
  return fit;
}

double pot_tail_quantile(ThetaParam theta, double threshold, double exceed_fraction, double p) {
  if (!(p > 0.0) || p > exceed_fraction) {
    throw DomainError("threshold extrapolation requires 0 < p <= exceedance fraction");
  }
  if (p == exceed_fraction) return threshold;
  return threshold + gpd_upper_quantile(theta, p / exceed_fraction);
}

std::vector<double> pot_tail_quantile_draws(const PotFit& fit, double p) {
  std::vector<double> q;
  q.reserve(fit.thetas.size());
  for (const auto& th : fit.thetas) {
    q.push_back(pot_tail_quantile(th, fit.threshold, fit.exceed_fraction, p));
  }
  return q;
}

std::vector<QuantileReport> pot_quantile_report(const PotFit& fit, std::span<const double> p_list) {
  std::vector<QuantileReport> out;
  for (double p : p_list) {
    const auto s = summarize(pot_tail_quantile_draws(fit, p));
    out.push_back({p, s.median, s.mean, s.lower, s.upper});
  }
  return out;
}

std::vector<double> threshold_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw DomainError("threshold grid needs step > 0 and to >= from");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) grid.push_back(from + static_cast<double>(i) * step);
  return grid;
}

std::vector<XiCurvePoint> pot_xi_curve(std::span<const double> values,
                                       std::span<const double> thresholds,
                                       const PriorConfig& prior, const SamplerConfig& config,
                                       std::size_t min_exceedances, std::size_t threads) {
  std::vector<XiCurvePoint> curve(thresholds.size());
  parallel_for(thresholds.size(), threads, [&](std::size_t i) {
    XiCurvePoint& pt = curve[i];
    pt.threshold = thresholds[i];
    pt.exceedances = static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double y) { return y > pt.threshold; }));
    if (pt.exceedances < std::max<std::size_t>(min_exceedances, 1)) return;
    SamplerConfig local = config;
    local.seed = derive_seed(config.seed, i);
    const PotFit fit = fit_pot(values, pt.threshold, prior, local, min_exceedances);
    pt.xi = summarize(fit.xi());
    pt.fitted = true;
  });
  return curve;
}

}  // namespace lgptail
