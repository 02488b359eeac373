#include "lgptail/priors.hpp"

#include <cmath>
#include <numbers>

#include "lgptail/error.hpp"

namespace lgptail {

namespace {
constexpr double kZetaScale = 1.5;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
}  // namespace

void PriorConfig::validate() const {
  if (!(alpha_min > 0.0) || !(alpha_min < 2.0)) throw InputError("alpha_min must lie in (0, 2)");
  if (!(a_kappa > 0.0) || !(b_kappa > 0.0)) throw InputError("a_kappa and b_kappa must be positive");
  if (!(a_lambda > 0.0) || !(b_lambda > 0.0)) {
    throw InputError("a_lambda and b_lambda must be positive");
  }
}

double alpha_from_zeta(double zeta, double alpha_min) {
  return alpha_min + (2.0 - alpha_min) * std::exp(zeta / kZetaScale);
}

double zeta_from_alpha(double alpha, double alpha_min) {
  if (!(alpha > alpha_min)) throw DomainError("alpha must exceed alpha_min");
  return kZetaScale * std::log((alpha - alpha_min) / (2.0 - alpha_min));
}

ThetaParam theta_from_coords(double zeta, double tau, double alpha_min) {
  return {alpha_from_zeta(zeta, alpha_min), std::exp(tau)};
}

double log_logistic_density(double zeta) {
  const double a = std::abs(zeta);
  return -a - 2.0 * std::log1p(std::exp(-a));
}

double log_half_cauchy_density_tau(double tau) {
  // log(2 / pi) - log(1 + sigma^2) + tau
  return std::log(2.0 / std::numbers::pi) - softplus(2.0 * tau) + tau;
}

double log_prior_theta(double zeta, double tau) {
  return log_logistic_density(zeta) + log_half_cauchy_density_tau(tau);
}

}  // namespace lgptail
