#pragma once

#include "lgptail/gpd.hpp"
#include "lgptail/gp_lowrank.hpp"

namespace lgptail {

/// Hyperparameters of the semiparametric prior. kappa^2 ~ InvGamma(a_kappa,
/// b_kappa) is integrated out analytically and never sampled.
struct PriorConfig {
  double alpha_min = 0.5;
  double a_kappa = 1.5;
  double b_kappa = 1.5;
  double a_lambda = 16.0;
  double b_lambda = 2.2;

  GammaPrior lambda_prior() const { return {a_lambda, b_lambda}; }
  /// Throws InputError unless every field is positive and alpha_min < 2.
  void validate() const;
};

/// alpha = alpha_min + (2 - alpha_min) exp(zeta / 1.5)
double alpha_from_zeta(double zeta, double alpha_min);
double zeta_from_alpha(double alpha, double alpha_min);

/// theta from the unconstrained sampler coordinates (zeta, tau = log sigma).
ThetaParam theta_from_coords(double zeta, double tau, double alpha_min);

/// Standard-logistic log density of zeta plus the half-Cauchy log density of
/// sigma = exp(tau) with the log-Jacobian tau.
double log_prior_theta(double zeta, double tau);
double log_logistic_density(double zeta);
double log_half_cauchy_density_tau(double tau);

}  // namespace lgptail
