#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lgptail/error.hpp"
#include "lgptail/gp_lowrank.hpp"
#include "oracles.hpp"

using namespace lgptail;

namespace {

// Kernel matrix built from scratch, jitter on the diagonal.
Eigen::MatrixXd ref_cov(double lambda, const std::vector<double>& a, const std::vector<double>& b,
                        double jitter) {
  Eigen::MatrixXd c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c(i, j) = std::exp(-lambda * lambda * (a[i] - b[j]) * (a[i] - b[j])) +
                (i == j && a.size() == b.size() ? jitter : 0.0);
  return c;
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

// Multivariate t with df nu and scale matrix sigma, via the explicit inverse.
double ref_mvt_logpdf(const Eigen::VectorXd& x, double nu, const Eigen::MatrixXd& sigma) {
  const double m = static_cast<double>(x.size());
  const double q = x.dot(sigma.inverse() * x);
  return std::lgamma(0.5 * (nu + m)) - std::lgamma(0.5 * nu) - 0.5 * m * std::log(nu * std::numbers::pi) -
         0.5 * std::log(sigma.determinant()) - 0.5 * (nu + m) * std::log1p(q / nu);
}

double ref_gauss_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& c) {
  const double m = static_cast<double>(x.size());
  return -0.5 * m * std::log(2 * std::numbers::pi) - 0.5 * std::log(c.determinant()) -
         0.5 * x.dot(c.inverse() * x);
}

const LambdaGrid& default_grid() {
  static const LambdaGrid g = LambdaGrid::build(KnotSet::uniform(11), Grid::uniform(101), {16, 2.2});
  return g;
}

}  // namespace

TEST(Kernel, ClosedFormValues) {
  EXPECT_NEAR(sq_exp_kernel(10, 0, 0.1), std::exp(-1.0), 1e-15);
  EXPECT_EQ(sq_exp_kernel(3.3, 0.4, 0.4), 1.0);
  EXPECT_EQ(sq_exp_kernel(3.3, 0.1, 0.7), sq_exp_kernel(3.3, 0.7, 0.1));
  EXPECT_NEAR(lambda_for_correlation(0.95), 10 * std::sqrt(std::log(1 / 0.95)), 1e-14);
  EXPECT_NEAR(lambda_for_correlation(0.95), 2.26480, 5e-6);
  EXPECT_NEAR(correlation_for_lambda(lambda_for_correlation(0.37)), 0.37, 1e-14);
}

TEST(Kernel, RejectsNonPositiveLambda) {
  EXPECT_THROW(sq_exp_kernel(0.0, 0, 1), DomainError);
  EXPECT_THROW(sq_exp_kernel(-1.0, 0, 1), DomainError);
}

TEST(GaussKl, SimpleCases) {
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 1.0;
  b << std::exp(1.0);
  EXPECT_NEAR(gauss_kl(a, b), 0.5 * std::exp(-1.0), 1e-14);
  EXPECT_EQ(gauss_kl(b, b), 0.0);
  const Eigen::MatrixXd c = ref_cov(4.0, {0, 0.3, 0.6, 1}, {0, 0.3, 0.6, 1}, 0.0);
  EXPECT_NEAR(gauss_kl(c, c), 0.0, 1e-12);
}

TEST(GaussKl, RejectsNonSpd) {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 2, 2, 1;
  b << 1, 0, 0, 1;
  EXPECT_THROW(gauss_kl(a, b), NumericalError);
  EXPECT_THROW(gauss_kl(b, a), NumericalError);
}

TEST(GaussKl, MatchesMonteCarlo) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1.3, 0.4, 0.4, 0.8;
  b << 0.9, -0.2, -0.2, 1.7;
  const Eigen::MatrixXd la = a.llt().matrixL();
  const int N = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < N; ++i) {
    Eigen::Vector2d e(z(rng), z(rng));
    const Eigen::VectorXd x = la * e;
    const double d = ref_gauss_logpdf(x, a) - ref_gauss_logpdf(x, b);
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / N;
  const double se = std::sqrt((sum2 / N - mean * mean) / N);
  EXPECT_NEAR(gauss_kl(a, b), mean, 3 * se);
}

TEST(KnotSet, ValidationAndDefaults) {
  const KnotSet k = KnotSet::uniform(11);
  EXPECT_EQ(k.size(), 11u);
  EXPECT_EQ(k[0], 0.0);
  EXPECT_EQ(k[10], 1.0);
  EXPECT_NEAR(k[3], 0.3, 1e-15);
  EXPECT_THROW(KnotSet({0.0, 0.5}), DomainError);
  EXPECT_THROW(KnotSet({0.0, 0.6, 0.4, 1.0}), DomainError);
  EXPECT_THROW(KnotSet(std::vector<double>{}), DomainError);
  EXPECT_NO_THROW(KnotSet({0.5}));
}

TEST(LambdaGridBuild, DefaultKnotsGiveThirtyPoints) {
  const auto& g = default_grid();
  EXPECT_GE(g.size(), 28u);
  EXPECT_LE(g.size(), 32u);
  EXPECT_EQ(g.size(), 30u);
}

TEST(LambdaGridBuild, TwentyOneKnotsGiveEightyTwoPoints) {
  const LambdaGrid g = LambdaGrid::build(KnotSet::uniform(21), Grid::uniform(101), {16, 2.2});
  EXPECT_GE(g.size(), 78u);
  EXPECT_LE(g.size(), 86u);
  EXPECT_EQ(g.size(), 82u);
}

TEST(LambdaGridBuild, MonotoneAndAnchored) {
  const auto& g = default_grid();
  const auto lam = g.lambdas();
  EXPECT_NEAR(correlation_for_lambda(lam.front()), 0.95, 1e-12);
  for (std::size_t i = 1; i < lam.size(); ++i) {
    EXPECT_GT(lam[i], lam[i - 1]);
    EXPECT_LT(correlation_for_lambda(lam[i]), correlation_for_lambda(lam[i - 1]));
  }
  EXPECT_GE(correlation_for_lambda(lam.back()), 0.2 - 1e-12);
}

TEST(LambdaGridBuild, ConsecutiveKlWithinStep) {
  const auto& g = default_grid();
  const auto s = to_vec(g.knots());
  const auto lam = g.lambdas();
  for (std::size_t i = 1; i < lam.size(); ++i) {
    const double kl = gauss_kl(ref_cov(lam[i - 1], s, s, 1e-10), ref_cov(lam[i], s, s, 1e-10));
    EXPECT_LE(kl, 0.5 + 1e-9);
    EXPECT_GT(kl, 0.0);
  }
}

TEST(LambdaGridBuild, WeightsAndFactors) {
  const auto& g = default_grid();
  double total = 0.0;
  const auto s = to_vec(g.knots());
  for (const auto& e : g.entries()) {
    total += std::exp(e.log_weight);
    const Eigen::MatrixXd c = ref_cov(e.lambda, s, s, 1e-10);
    EXPECT_LT((e.chol * e.chol.transpose() - c).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(e.log_det, std::log(c.determinant()), 1e-6 * std::abs(e.log_det) + 1e-8);
    EXPECT_EQ(e.project.rows(), 101);
    EXPECT_EQ(e.project.cols(), 11);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(LambdaGridBuild, WeightsAreGammaCellMasses) {
  const auto& g = default_grid();
  const auto lam = g.lambdas();
  const boost::math::gamma_distribution<double> prior(16.0, 1.0 / 2.2);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double lo = i == 0 ? 0.0 : std::sqrt(lam[i - 1] * lam[i]);
    const double hi = i + 1 == lam.size() ? 1e6 : std::sqrt(lam[i] * lam[i + 1]);
    const double mass = boost::math::cdf(prior, hi) - boost::math::cdf(prior, lo);
    EXPECT_NEAR(std::exp(g[i].log_weight), mass, 1e-12);
  }
}

TEST(LambdaGridBuild, RejectsBadOptions) {
  LambdaGridOptions o;
  o.rho_stop = 0.99;
  EXPECT_THROW(LambdaGrid::build(KnotSet::uniform(5), Grid::uniform(11), {16, 2.2}, o), DomainError);
  EXPECT_THROW(LambdaGrid::build(KnotSet::uniform(5), Grid::uniform(11), {-1, 2.2}), DomainError);
}

TEST(LambdaGridCache, SaveLoadRoundtrip) {
  const auto dir = std::filesystem::temp_directory_path() / "lgptail_cache_test";
  std::filesystem::remove_all(dir);
  const KnotSet k = KnotSet::uniform(6);
  const Grid grid = Grid::uniform(21);
  const LambdaGrid a = LambdaGrid::cached(dir, k, grid, {16, 2.2});
  const auto file = dir / LambdaGrid::cache_name(k, grid, {16, 2.2});
  ASSERT_TRUE(std::filesystem::exists(file));
  LambdaGrid b;
  ASSERT_TRUE(LambdaGrid::load(file, k, grid, {16, 2.2}, {}, b));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lambda, b[i].lambda);
    EXPECT_EQ(a[i].log_weight, b[i].log_weight);
    EXPECT_EQ(a[i].project, b[i].project);
    EXPECT_EQ(a[i].chol, b[i].chol);
  }
  LambdaGrid c;
  EXPECT_FALSE(LambdaGrid::load(file, k, grid, {15, 2.2}, {}, c));
  EXPECT_FALSE(LambdaGrid::load(file, KnotSet::uniform(7), grid, {16, 2.2}, {}, c));
  EXPECT_FALSE(LambdaGrid::load(dir / "missing.bin", k, grid, {16, 2.2}, {}, c));
  std::filesystem::remove_all(dir);
}

TEST(MarginalPrior, OneKnotIntegratesToOne) {
  const KnotSet k({0.5});
  const std::vector<double> lam{1.0, 3.0, 7.0}, w{0.2, 0.5, 0.3};
  const LambdaGrid g = LambdaGrid::from_support(k, Grid::uniform(11), lam, w);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double total = integrator.integrate(
      [&](double x) {
        const double v[1] = {x};
        return std::exp(marginal_log_prior(v, g, 1.5, 1.5));
      },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(MarginalPrior, EvenFunction) {
  const auto& g = default_grid();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int r = 0; r < 20; ++r) {
    std::vector<double> w(11), neg(11);
    for (std::size_t i = 0; i < 11; ++i) {
      w[i] = z(rng);
      neg[i] = -w[i];
    }
    EXPECT_DOUBLE_EQ(marginal_log_prior(w, g, 1.5, 1.5), marginal_log_prior(neg, g, 1.5, 1.5));
  }
}

TEST(MarginalPrior, SingleLambdaMatchesMultivariateT) {
  const KnotSet k = KnotSet::uniform(11);
  const double lambda = 8.0, jitter = 1e-10;
  const std::vector<double> lam{lambda}, wt{1.0};
  const LambdaGrid g = LambdaGrid::from_support(k, Grid::uniform(101), lam, wt, jitter);
  const auto s = to_vec(k.points());
  const double a = 1.5, b = 1.5;
  const Eigen::MatrixXd sigma = (b / a) * ref_cov(lambda, s, s, jitter);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int r = 0; r < 100; ++r) {
    Eigen::VectorXd x(11);
    for (auto& v : x) v = z(rng);
    const std::vector<double> xv(x.begin(), x.end());
    EXPECT_NEAR(marginal_log_prior(xv, g, a, b), ref_mvt_logpdf(x, 2 * a, sigma), 1e-10);
  }
}

TEST(MixtureWeights, OriginProportionalToPriorOverRootDet) {
  const auto& g = default_grid();
  const auto s = to_vec(g.knots());
  const auto w = mixture_weights(std::vector<double>(11, 0.0), g, 1.5, 1.5);
  std::vector<double> expected;
  double total = 0.0;
  for (const auto& e : g.entries()) {
    expected.push_back(std::exp(e.log_weight) / std::sqrt(ref_cov(e.lambda, s, s, 1e-10).determinant()));
    total += expected.back();
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(w[i], expected[i] / total, 1e-6 * expected[i] / total + 1e-15);
    sum += w[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(MixtureWeights, DuplicatedLambdaEqualWeights) {
  const std::vector<double> lam{4.0, 4.0, 4.0}, w{1.0, 1.0, 1.0};
  const LambdaGrid g = LambdaGrid::from_support(KnotSet::uniform(5), Grid::uniform(11), lam, w);
  const auto p = mixture_weights(std::vector<double>{0.3, -1.0, 2.0, 0.1, 0.5}, g, 1.5, 1.5);
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-14);
}

TEST(MixtureWeights, InvariantToCommonScaleOfPriorWeights) {
  const std::vector<double> lam{2.0, 5.0, 9.0}, w1{0.1, 0.6, 0.3}, w2{0.7, 4.2, 2.1};
  const KnotSet k = KnotSet::uniform(5);
  const LambdaGrid a = LambdaGrid::from_support(k, Grid::uniform(11), lam, w1);
  const LambdaGrid b = LambdaGrid::from_support(k, Grid::uniform(11), lam, w2);
  const std::vector<double> x{0.3, -1.0, 2.0, 0.1, 0.5};
  const auto pa = mixture_weights(x, a, 1.5, 1.5), pb = mixture_weights(x, b, 1.5, 1.5);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-14);
}

TEST(PredictiveProject, ZeroInZeroOut) {
  const auto v = predictive_project(std::vector<double>(11, 0.0), default_grid(), 1.5, 1.5);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(PredictiveProject, InterpolatesAtKnots) {
  const auto& g = default_grid();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> w(11);
  for (auto& v : w) v = z(rng);
  const auto t = predictive_project(w, g, 1.5, 1.5);
  for (std::size_t j = 0; j < 11; ++j) EXPECT_NEAR(t[10 * j], w[j], 1e-8);
}

TEST(PredictiveProject, SingleLambdaConditionalMean) {
  const KnotSet k = KnotSet::uniform(11);
  const Grid grid = Grid::uniform(101);
  const double lambda = 8.0;
  const std::vector<double> lam{lambda}, wt{1.0};
  const LambdaGrid g = LambdaGrid::from_support(k, grid, lam, wt, 1e-10);
  const auto s = to_vec(k.points());
  const auto t = to_vec(grid.points());
  const Eigen::MatrixXd cs = ref_cov(lambda, s, s, 1e-10);
  const Eigen::MatrixXd cts = ref_cov(lambda, t, s, 0.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd w(11);
  for (auto& v : w) v = z(rng);
  const Eigen::VectorXd expected = cts * cs.fullPivLu().solve(w);
  const auto got = predictive_project(std::vector<double>(w.begin(), w.end()), g, 1.5, 1.5);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-8);
}

TEST(LambdaPrior, RhoIntervalProbabilityByQuadrature) {
  using boost::math::quadrature::gauss_kronrod;
  const double a = 16.0, b = 2.2;
  auto pdf = [&](double l) {
    return std::exp(a * std::log(b) + (a - 1) * std::log(l) - b * l - std::lgamma(a));
  };
  // rho = exp(-lambda^2 / 100) in (0.28, 0.84)  <=>  lambda in (lo, hi)
  const double lo = 10 * std::sqrt(-std::log(0.84));
  const double hi = 10 * std::sqrt(-std::log(0.28));
  const double p = gauss_kronrod<double, 61>::integrate(pdf, lo, hi, 15, 1e-14);
  EXPECT_NEAR(p, 0.95, 0.005);
}

TEST(LambdaPrior, MeanUpcrossingsFollowRiceFormula) {
  // E[lambda] / (pi sqrt 2) with lambda ~ Ga(16, 2.2).
  const double rice = (16.0 / 2.2) / (std::numbers::pi * std::sqrt(2.0));
  const auto s = oracle::upcrossings(4000, 16.0, 2.2, 8);
  EXPECT_NEAR(s.mean, rice, 0.1 * rice);
}
