#include "lgptail/simstudy.hpp"

#include <algorithm>
#include <cmath>

#include "lgptail/error.hpp"
#include "lgptail/model.hpp"
#include "lgptail/parallel.hpp"
#include "lgptail/pot.hpp"
#include "lgptail/summaries.hpp"

namespace lgptail {

std::string_view method_name(Method m) { return m == Method::Semi ? "semi" : "thresh"; }

Method parse_method(std::string_view name) {
  if (name == "semi") return Method::Semi;
  if (name == "thresh") return Method::Thresh;
  throw InputError("unknown method '" + std::string(name) + "' (expected semi or thresh)");
}

void ExperimentSpec::validate() const {
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (!(xi_true > 0.0)) throw InputError("xi_true must be positive");
  if (n < 2) throw InputError("sample size must be at least 2");
  if (!(threshold_quantile > 0.0 && threshold_quantile < 1.0)) {
    throw InputError("threshold_quantile must lie in (0, 1)");
  }
  for (double p : p_list) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("tail probabilities must lie in (0, 1)");
  }
  sampler.validate();
  prior.validate();
}

double true_tail_quantile(SyntheticFamily family, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tail probability must lie in (0, 1)");
  const ThetaParam unit{family.alpha, 1.0};
  switch (family.kind) {
    case FamilyKind::Gpd:
      return gpd_upper_quantile(unit, p);
    case FamilyKind::Gpd4:
      // G(y)^4 = 1 - p, so 1 - G(y) = 1 - (1 - p)^{1/4}.
      return gpd_upper_quantile(unit, -std::expm1(0.25 * std::log1p(-p)));
    case FamilyKind::HalfT: {
      double lo = 0.0, hi = 1.0;
      while (halft_survival(family.alpha, hi) > p) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("half-t quantile bracket overflow");
      }
      for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (halft_survival(family.alpha, mid) > p) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  throw DomainError("unknown family");
}

namespace {

void fill_semi(const ExperimentSpec& spec, std::shared_ptr<const LambdaGrid> lambda_grid,
               std::vector<double> data, std::uint64_t chain_seed, ReplicateResult& r) {
  auto grid = std::make_shared<const Grid>(Grid::uniform(spec.grid_size));
  auto dataset = std::make_shared<const Dataset>(std::move(data));
  SemiparametricModel model(dataset, std::move(lambda_grid), grid, spec.prior);
  SamplerConfig cfg = spec.sampler;
  cfg.seed = chain_seed;
  const PosteriorDraws draws = run_chain(cfg, model);
  const auto xi = xi_summary(draws, spec.prior.alpha_min);
  r.xi_estimate = xi.mean;
  r.xi_lower = xi.lower;
  r.xi_upper = xi.upper;
  const auto fits = fitted_densities(draws, model);
  for (const auto& q : quantile_report(fits, spec.p_list)) {
    r.q_estimate.push_back(q.estimate);
    r.q_lower.push_back(q.lower95);
    r.q_upper.push_back(q.upper95);
  }
  for (const auto& b : draws.blocks) r.acceptance.push_back(b.acceptance());
  for (Eigen::Index row = 0; row < draws.draws.rows(); ++row) {
    const Eigen::VectorXd x = draws.draws.row(row).transpose();
    r.clamped += model.clamped_points(ChainState::unpack(x));
  }
  r.clamped_evaluations = model.clamp_count();
}

void fill_thresh(const ExperimentSpec& spec, std::vector<double> data, std::uint64_t chain_seed,
                 ReplicateResult& r) {
  std::sort(data.begin(), data.end());
  const double threshold = empirical_quantile(data, spec.threshold_quantile);
  r.threshold = threshold;
  SamplerConfig cfg = spec.sampler;
  cfg.seed = chain_seed;
  const PotFit fit = fit_pot(data, threshold, spec.prior, cfg, 1);
  const auto xi = summarize(fit.xi());
  r.xi_estimate = xi.mean;
  r.xi_lower = xi.lower;
  r.xi_upper = xi.upper;
  for (const auto& q : pot_quantile_report(fit, spec.p_list)) {
    r.q_estimate.push_back(q.estimate);
    r.q_lower.push_back(q.lower95);
    r.q_upper.push_back(q.upper95);
  }
  for (const auto& b : fit.chain.blocks) r.acceptance.push_back(b.acceptance());
}

}  // namespace

ReplicateResult run_replicate(const ExperimentSpec& spec, std::size_t index,
                              std::shared_ptr<const LambdaGrid> lambda_grid) {
  ReplicateResult r;
  r.index = index;
  const SyntheticFamily family = spec.synthetic();
  for (double p : spec.p_list) r.q_true.push_back(true_tail_quantile(family, p));
  try {
    Rng rng(derive_seed(spec.seed, 2 * index));
    std::vector<double> data = sample_family(family, spec.n, rng);
    const std::uint64_t chain_seed = derive_seed(spec.seed, 2 * index + 1);
    if (spec.method == Method::Semi) {
      fill_semi(spec, std::move(lambda_grid), std::move(data), chain_seed, r);
    } else {
      fill_thresh(spec, std::move(data), chain_seed, r);
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

MetricsRow aggregate(const ExperimentSpec& spec, const std::vector<ReplicateResult>& reps) {
  MetricsRow row;
  row.replicates = reps.size();
  const std::size_t np = spec.p_list.size();
  std::vector<double> rmae(np, 0.0), qcover(np, 0.0);
  double sum_err = 0.0, sum_sq = 0.0, cover = 0.0;
  std::size_t ok = 0;
  for (const auto& r : reps) {
    row.clamped += r.clamped;
    if (!r.ok) {
      ++row.failures;
      continue;
    }
    ++ok;
    const double err = r.xi_estimate - spec.xi_true;
    sum_err += err;
    sum_sq += err * err;
    if (r.xi_lower <= spec.xi_true && spec.xi_true <= r.xi_upper) cover += 1.0;
    for (std::size_t k = 0; k < np; ++k) {
      rmae[k] += std::abs(r.q_estimate[k] - r.q_true[k]) / r.q_true[k];
      if (r.q_lower[k] <= r.q_true[k] && r.q_true[k] <= r.q_upper[k]) qcover[k] += 1.0;
    }
  }
  if (ok > 0) {
    const double d = static_cast<double>(ok);
    row.bias = sum_err / d;
    row.rmse = std::sqrt(sum_sq / d);
    row.coverage = 100.0 * cover / d;
    for (std::size_t k = 0; k < np; ++k) {
      row.quantiles.push_back({spec.p_list[k], rmae[k] / d, 100.0 * qcover[k] / d});
    }
  }
  row.valid = ok > 0 && 10 * row.failures <= row.replicates;
  return row;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                std::shared_ptr<const LambdaGrid> lambda_grid) {
  spec.validate();
  if (spec.method == Method::Semi && !lambda_grid) {
    lambda_grid = std::make_shared<const LambdaGrid>(
        LambdaGrid::build(KnotSet::uniform(spec.knot_count), Grid::uniform(spec.grid_size),
                          spec.prior.lambda_prior()));
  }
  ExperimentResult result;
  result.spec = spec;
  result.replicates.resize(spec.replicates);
  parallel_for(spec.replicates, spec.threads, [&](std::size_t i) {
    result.replicates[i] = run_replicate(spec, i, lambda_grid);
  });
  result.metrics = aggregate(spec, result.replicates);
  return result;
}

}  // namespace lgptail
