#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lgptail/error.hpp"
#include "lgptail/priors.hpp"

using namespace lgptail;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(AlphaTransform, ZeroMapsToTwo) {
  EXPECT_DOUBLE_EQ(alpha_from_zeta(0.0, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(alpha_from_zeta(0.0, 1.2), 2.0);
}

TEST(AlphaTransform, MonotoneAndBoundedBelow) {
  double prev = 0.0;
  for (double z = -40.0; z <= 10.0; z += 0.5) {
    const double a = alpha_from_zeta(z, 0.5);
    EXPECT_GT(a, 0.5);
    EXPECT_GT(a, prev);
    prev = a;
  }
  EXPECT_NEAR(alpha_from_zeta(-60.0, 0.5), 0.5, 1e-15);
}

TEST(AlphaTransform, Roundtrip) {
  for (double a : {0.51, 1.0, 2.0, 3.7, 25.0}) {
    EXPECT_NEAR(alpha_from_zeta(zeta_from_alpha(a, 0.5), 0.5), a, 1e-12 * a);
  }
  EXPECT_THROW(zeta_from_alpha(0.5, 0.5), DomainError);
  EXPECT_THROW(zeta_from_alpha(0.2, 0.5), DomainError);
}

TEST(ThetaCoords, ExponentiatesTau) {
  const ThetaParam th = theta_from_coords(0.0, std::log(3.0), 0.5);
  EXPECT_DOUBLE_EQ(th.alpha, 2.0);
  EXPECT_DOUBLE_EQ(th.sigma, 3.0);
}

TEST(LogisticPrior, ClosedFormAndNormalization) {
  EXPECT_NEAR(log_logistic_density(0.0), std::log(0.25), 1e-15);
  EXPECT_DOUBLE_EQ(log_logistic_density(2.3), log_logistic_density(-2.3));
  EXPECT_TRUE(std::isfinite(log_logistic_density(800.0)));
  boost::math::quadrature::tanh_sinh<double> q;
  const double total = q.integrate([](double z) { return std::exp(log_logistic_density(z)); }, -kInf, kInf);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(HalfCauchyPrior, DensityInLogScaleNormalized) {
  // sigma = 1 gives (2 / pi) / 2 on the sigma scale, times the Jacobian 1.
  EXPECT_NEAR(log_half_cauchy_density_tau(0.0), std::log(1.0 / std::numbers::pi), 1e-15);
  const double s = 4.0;
  EXPECT_NEAR(log_half_cauchy_density_tau(std::log(s)),
              std::log(2.0 / (std::numbers::pi * (1 + s * s)) * s), 1e-14);
  EXPECT_TRUE(std::isfinite(log_half_cauchy_density_tau(500.0)));
  boost::math::quadrature::tanh_sinh<double> q;
  const double total =
      q.integrate([](double t) { return std::exp(log_half_cauchy_density_tau(t)); }, -kInf, kInf);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(ThetaPrior, SumOfMarginals) {
  EXPECT_DOUBLE_EQ(log_prior_theta(0.7, -1.2), log_logistic_density(0.7) + log_half_cauchy_density_tau(-1.2));
}

TEST(ThetaPrior, ImpliedAlphaMedianIsTwo) {
  // Under the logistic prior, P(alpha <= 2) = P(zeta <= 0) = 1/2.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int N = 200000;
  int below = 0;
  for (int i = 0; i < N; ++i) {
    const double u = U(rng);
    if (alpha_from_zeta(std::log(u / (1 - u)), 0.5) <= 2.0) ++below;
  }
  EXPECT_NEAR(static_cast<double>(below) / N, 0.5, 3 * std::sqrt(0.25 / N));
}

TEST(PriorConfig, Validation) {
  PriorConfig p;
  EXPECT_NO_THROW(p.validate());
  p.alpha_min = 2.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.alpha_min = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.a_kappa = -1;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.b_lambda = 0;
  EXPECT_THROW(p.validate(), InputError);
  EXPECT_EQ(PriorConfig{}.lambda_prior().shape, 16.0);
}
