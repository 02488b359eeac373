#include <gtest/gtest.h>

#include <cmath>

#include "lgptail/error.hpp"
#include "lgptail/model.hpp"
#include "lgptail/pot.hpp"
#include "oracles.hpp"

using namespace lgptail;

namespace {

SamplerConfig short_chain(std::size_t n_iter, std::uint64_t seed = 1) {
  SamplerConfig c;
  c.n_iter = n_iter;
  c.seed = seed;
  return c;
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Posterior mean of xi by midpoint quadrature of an arbitrary log density.
template <class F>
double grid_mean_xi(F logp, double z0, double z1, double t0, double t1, int k = 200) {
  std::vector<double> lp, xi;
  double mx = -INFINITY;
  for (int i = 0; i < k; ++i) {
    const double z = z0 + (z1 - z0) * (i + 0.5) / k;
    for (int j = 0; j < k; ++j) {
      const double t = t0 + (t1 - t0) * (j + 0.5) / k;
      lp.push_back(logp(z, t));
      xi.push_back(1.0 / alpha_from_zeta(z, 0.5));
      mx = std::max(mx, lp.back());
    }
  }
  double w = 0.0, m = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const double p = std::exp(lp[i] - mx);
    w += p;
    m += p * xi[i];
  }
  return m / w;
}

}  // namespace

TEST(PotQuantile, ClosedForms) {
  EXPECT_NEAR(pot_tail_quantile({2, 1}, 0.0, 1.0, 0.25), 2.0, 1e-14);
  EXPECT_EQ(pot_tail_quantile({2, 1}, 0.93, 0.1, 0.1), 0.93);
  EXPECT_NEAR(pot_tail_quantile({2, 1}, 1.0, 0.5, 0.125), 3.0, 1e-14);
  EXPECT_THROW(pot_tail_quantile({2, 1}, 1.0, 0.1, 0.2), DomainError);
  EXPECT_THROW(pot_tail_quantile({2, 1}, 1.0, 0.1, 0.0), DomainError);
}

TEST(PotQuantile, ContinuousAndDecreasing) {
  const ThetaParam th{1.7, 0.8};
  double prev = INFINITY;
  for (double p = 1e-6; p <= 0.2; p *= 1.1) {
    const double q = pot_tail_quantile(th, 0.5, 0.2, p);
    EXPECT_LT(q, prev);
    prev = q;
  }
  EXPECT_NEAR(pot_tail_quantile(th, 0.5, 0.2, 0.2 * (1 - 1e-12)), 0.5, 1e-9);
}

TEST(FitPot, RejectsTooFewExceedances) {
  const auto y = oracle::gpd_draws(2.0, 1.0, 100, 1);
  const double top = *std::max_element(y.begin(), y.end());
  EXPECT_THROW(fit_pot(y, top, {}, short_chain(100)), InputError);
  try {
    fit_pot(y, 0.0, {}, short_chain(100), 500);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("100 exceedances"), std::string::npos);
  }
}

TEST(FitPot, BookkeepingAndDraws) {
  const auto y = oracle::gpd_draws(2.0, 1.0, 1000, 2);
  const auto fit = fit_pot(y, 1.0, {}, short_chain(2000));
  const auto k = static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [](double v) { return v > 1.0; }));
  EXPECT_EQ(fit.exceedances, k);
  EXPECT_EQ(fit.sample_size, 1000u);
  EXPECT_DOUBLE_EQ(fit.exceed_fraction, static_cast<double>(k) / 1000.0);
  EXPECT_EQ(fit.thetas.size(), fit.chain.rows());
  const auto rep = pot_quantile_report(fit, std::vector<double>{1e-2, 1e-3});
  EXPECT_LT(rep[0].estimate, rep[1].estimate);
  EXPECT_THROW(pot_quantile_report(fit, std::vector<double>{0.9}), DomainError);
}

TEST(FitPot, ZeroThresholdRecoversGpd) {
  const auto y = oracle::gpd_draws(2.0, 1.0, 10000, 3);
  const double q = oracle::quadrature_xi(oracle::GpdPosterior{y, 0.5}, 200).mean_xi;
  const auto fit = fit_pot(y, 0.0, {}, short_chain(20000, 4));
  EXPECT_NEAR(mean(fit.xi()), q, 0.05);
  EXPECT_NEAR(mean(fit.xi()), 0.5, 0.05);
}

TEST(FitPot, SameTargetAsReducedSemiparametricModel) {
  const auto y = oracle::gpd_draws(2.0, 1.0, 500, 5);
  auto grid = std::make_shared<const Grid>(Grid::uniform(101));
  auto lg = std::make_shared<const LambdaGrid>(LambdaGrid::build(KnotSet::uniform(11), *grid, {16, 2.2}));
  const SemiparametricModel model(std::make_shared<const Dataset>(y), lg, grid, {});
  auto semi = [&](double z, double t) {
    const auto parts = model.log_posterior_parts({z, t, std::vector<double>(11, 0.0)});
    return parts.log_likelihood + parts.log_prior_theta;
  };
  auto pot = [&](double z, double t) { return gpd_only_log_posterior(z, t, y, {}); };
  const double a = grid_mean_xi(semi, -1.0, 1.0, -0.6, 0.6);
  const double b = grid_mean_xi(pot, -1.0, 1.0, -0.6, 0.6);
  EXPECT_NEAR(a, b, 1e-3);
}

TEST(XiCurve, DefaultThresholdGrid) {
  const auto g = threshold_grid();
  ASSERT_EQ(g.size(), 120u);
  EXPECT_DOUBLE_EQ(g.front(), 0.005);
  EXPECT_NEAR(g.back(), 2.980, 1e-12);
  EXPECT_NEAR(g[1] - g[0], 0.025, 1e-15);
  EXPECT_EQ(threshold_grid(0.0, 1.0, 0.25).size(), 5u);
  EXPECT_THROW(threshold_grid(1.0, 0.0, 0.1), DomainError);
}

TEST(XiCurve, GapsCountsAndDeterminism) {
  const auto y = oracle::gpd_draws(2.0, 1.0, 300, 6);
  const auto ts = threshold_grid(0.0, 6.0, 0.5);
  const auto a = pot_xi_curve(y, ts, {}, short_chain(1000, 7), 30, 1);
  const auto b = pot_xi_curve(y, ts, {}, short_chain(1000, 7), 30, 2);
  ASSERT_EQ(a.size(), ts.size());
  bool gap_seen = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) EXPECT_LE(a[i].exceedances, a[i - 1].exceedances);
    EXPECT_EQ(a[i].fitted, a[i].exceedances >= 30);
    EXPECT_EQ(a[i].fitted, b[i].fitted);
    EXPECT_EQ(a[i].xi.mean, b[i].xi.mean);
    if (!a[i].fitted) gap_seen = true;
  }
  EXPECT_TRUE(gap_seen);
  EXPECT_TRUE(a.front().fitted);
}

TEST(XiCurve, FlatAcrossThresholdsForGpdData) {
  // Regress xi estimates on threshold per replicate; the mean slope over 20
  // replicates must be statistically indistinguishable from 0.
  const auto ts = threshold_grid(0.005, 2.5, 0.25);
  std::vector<double> slopes;
  for (unsigned r = 0; r < 20; ++r) {
    const auto y = oracle::gpd_draws(2.0, 1.0, 1000, 100 + r);
    const auto curve = pot_xi_curve(y, ts, {}, short_chain(4000, 200 + r));
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (const auto& pt : curve) {
      if (!pt.fitted) continue;
      sx += pt.threshold;
      sy += pt.xi.mean;
      sxx += pt.threshold * pt.threshold;
      sxy += pt.threshold * pt.xi.mean;
      k += 1;
    }
    slopes.push_back((k * sxy - sx * sy) / (k * sxx - sx * sx));
  }
  const double m = mean(slopes);
  double ss = 0.0;
  for (double s : slopes) ss += (s - m) * (s - m);
  const double se = std::sqrt(ss / (slopes.size() - 1) / slopes.size());
  EXPECT_LT(std::abs(m), 1.96 * se) << "mean slope " << m << " se " << se;
}
