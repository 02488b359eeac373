#include "lgptail/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lgptail/error.hpp"

namespace lgptail {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Dataset::Dataset(std::vector<double> values, Provenance provenance)
    : sorted_(std::move(values)), provenance_(provenance) {
  if (sorted_.empty()) throw InputError("dataset is empty");
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (!std::isfinite(sorted_[i]) || !(sorted_[i] > 0.0)) {
      throw InputError("observation " + std::to_string(i) + " is not a positive finite value (" +
                       std::to_string(sorted_[i]) + ")");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
  if (provenance_.original_count == 0) provenance_.original_count = sorted_.size();
}

double Dataset::median() const {
  const std::size_t n = sorted_.size();
  return n % 2 == 1 ? sorted_[n / 2] : 0.5 * (sorted_[n / 2 - 1] + sorted_[n / 2]);
}

double Dataset::inclusion_fraction() const {
  return static_cast<double>(sorted_.size()) / static_cast<double>(provenance_.original_count);
}

Eigen::VectorXd ChainState::pack() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(omega.size() + 2));
  x[0] = zeta;
  x[1] = tau;
  for (std::size_t j = 0; j < omega.size(); ++j) x[static_cast<Eigen::Index>(j + 2)] = omega[j];
  return x;
}

ChainState ChainState::unpack(const Eigen::VectorXd& x) {
  if (x.size() < 2) throw DomainError("chain state needs at least zeta and tau");
  ChainState s;
  s.zeta = x[0];
  s.tau = x[1];
  s.omega.assign(x.data() + 2, x.data() + x.size());
  return s;
}

SemiparametricModel::SemiparametricModel(std::shared_ptr<const Dataset> data,
                                         std::shared_ptr<const LambdaGrid> lambda_grid,
                                         std::shared_ptr<const Grid> grid, PriorConfig prior)
    : data_(std::move(data)),
      lambda_grid_(std::move(lambda_grid)),
      grid_(std::move(grid)),
      prior_(prior) {
  if (!data_ || !lambda_grid_ || !grid_) throw DomainError("model inputs must be non-null");
  if (lambda_grid_->grid_size() != grid_->size()) {
    throw DomainError("lambda grid was built for a different density grid");
  }
  prior_.validate();
}

ThetaParam SemiparametricModel::theta(const ChainState& s) const {
  return theta_from_coords(s.zeta, s.tau, prior_.alpha_min);
}

GridDensity SemiparametricModel::density(std::span<const double> omega_knots) const {
  const auto field = evaluate_knot_field(omega_knots, *lambda_grid_, prior_.a_kappa, prior_.b_kappa);
  return GridDensity::from_log_values(
      std::span<const double>(field.omega_grid.data(), static_cast<std::size_t>(field.omega_grid.size())),
      grid_);
}

double SemiparametricModel::transform_data(ThetaParam theta, std::vector<double>& u) const {
  const auto y = data_->values();
  u.resize(y.size());
  const double scale = theta.alpha * theta.sigma;
  double sum_log_base = 0.0;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double lb = std::log1p(y[i] / scale);
    sum_log_base += lb;
    double surv = std::exp(-theta.alpha * lb);
    if (surv < kUClamp) {
      surv = kUClamp;
      ++clamped;
    } else if (surv > 1.0 - kUClamp) {
      surv = 1.0 - kUClamp;
      ++clamped;
    }
    u[i] = 1.0 - surv;
  }
  if (clamped != 0) clamp_count_.fetch_add(clamped);
  return -static_cast<double>(y.size()) * std::log(theta.sigma) - (theta.alpha + 1.0) * sum_log_base;
}

std::size_t SemiparametricModel::clamped_points(const ChainState& s) const {
  const ThetaParam th = theta(s);
  std::size_t clamped = 0;
  for (double y : data_->values()) {
    const double surv = gpd_survival(th, y);
    if (surv < kUClamp || surv > 1.0 - kUClamp) ++clamped;
  }
  return clamped;
}

double SemiparametricModel::log_likelihood(const ChainState& s) const {
  const ThetaParam th = theta(s);
  if (!std::isfinite(th.alpha) || !std::isfinite(th.sigma) || !(th.sigma > 0.0)) {
    throw NumericalError("non-finite theta (alpha=" + std::to_string(th.alpha) +
                         ", sigma=" + std::to_string(th.sigma) + ")");
  }
  const GridDensity psi = density(s.omega);
  const auto y = data_->values();
  const double scale = th.alpha * th.sigma;
  const double log_sigma = std::log(th.sigma);
  std::vector<double> u;
  const double log_g = transform_data(th, u);
  if (std::isfinite(log_g)) {
    const double log_psi = psi.sum_log_sorted(u);
    if (std::isfinite(log_psi)) return log_g + log_psi;
  }
  // Locate the offending observation.
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double term = -log_sigma - (th.alpha + 1.0) * std::log1p(y[i] / scale) + psi.log_eval(u[i]);
    if (!std::isfinite(term)) {
      throw NumericalError("non-finite log-likelihood contribution at observation " +
                           std::to_string(i) + " (y=" + std::to_string(y[i]) + ")");
    }
  }
  throw NumericalError("non-finite log-likelihood");
}

PosteriorParts SemiparametricModel::log_posterior_parts(const ChainState& s) const {
  PosteriorParts parts;
  parts.log_likelihood = log_likelihood(s);
  parts.log_prior_theta = log_prior_theta(s.zeta, s.tau);
  parts.log_prior_omega = marginal_log_prior(s.omega, *lambda_grid_, prior_.a_kappa, prior_.b_kappa);
  return parts;
}

const SemiparametricModel::Target::ThetaSlot& SemiparametricModel::Target::theta_slot(double zeta,
                                                                                      double tau) {
  for (const auto& slot : theta_) {
    if (slot.valid && slot.zeta == zeta && slot.tau == tau) return slot;
  }
  ThetaSlot& slot = theta_[next_theta_];
  next_theta_ ^= 1;
  slot.zeta = zeta;
  slot.tau = tau;
  slot.valid = true;
  const ThetaParam th = theta_from_coords(zeta, tau, model_->prior_.alpha_min);
  if (!std::isfinite(th.alpha) || !std::isfinite(th.sigma) || !(th.sigma > 0.0) ||
      !(th.alpha > 0.0)) {
    slot.log_g = kNegInf;
    slot.log_prior = kNegInf;
    slot.u.clear();
    return slot;
  }
  slot.log_g = model_->transform_data(th, slot.u);
  slot.log_prior = log_prior_theta(zeta, tau);
  return slot;
}

const SemiparametricModel::Target::OmegaSlot& SemiparametricModel::Target::omega_slot(
    const Eigen::VectorXd& x) {
  const std::size_t m = static_cast<std::size_t>(x.size()) - 2;
  const double* w = x.data() + 2;
  for (const auto& slot : omega_) {
    if (slot.omega.size() == m && std::equal(slot.omega.begin(), slot.omega.end(), w)) return slot;
  }
  OmegaSlot& slot = omega_[next_omega_];
  next_omega_ ^= 1;
  slot.omega.assign(w, w + m);
  slot.psi.reset();
  slot.log_prior = kNegInf;
  for (double v : slot.omega) {
    if (!std::isfinite(v)) return slot;
  }
  const PriorConfig& prior = model_->prior_;
  const auto field = evaluate_knot_field(slot.omega, *model_->lambda_grid_, prior.a_kappa, prior.b_kappa);
  if (!std::isfinite(field.log_prior) || !field.omega_grid.allFinite()) return slot;
  slot.log_prior = field.log_prior;
  slot.psi = GridDensity::from_log_values(
      std::span<const double>(field.omega_grid.data(), static_cast<std::size_t>(field.omega_grid.size())),
      model_->grid_);
  return slot;
}

double SemiparametricModel::Target::operator()(const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != model_->dim()) {
    throw DomainError("state dimension mismatch");
  }
  const ThetaSlot& ts = theta_slot(x[0], x[1]);
  if (!std::isfinite(ts.log_g) || !std::isfinite(ts.log_prior)) return kNegInf;
  const OmegaSlot& os = omega_slot(x);
  if (!os.psi) return kNegInf;
  const double total = ts.log_g + ts.log_prior + os.log_prior + os.psi->sum_log_sorted(ts.u);
  return std::isfinite(total) ? total : kNegInf;
}

double gpd_only_log_posterior(double zeta, double tau, std::span<const double> values,
                              const PriorConfig& prior) {
  const ThetaParam th = theta_from_coords(zeta, tau, prior.alpha_min);
  if (!std::isfinite(th.alpha) || !std::isfinite(th.sigma) || !(th.sigma > 0.0)) return kNegInf;
  const double scale = th.alpha * th.sigma;
  double sum_log_base = 0.0;
  for (const double y : values) {
    if (!(y >= 0.0)) throw DomainError("GPD-only posterior requires nonnegative values");
    sum_log_base += std::log1p(y / scale);
  }
  const double loglik =
      -static_cast<double>(values.size()) * tau - (th.alpha + 1.0) * sum_log_base;
  const double total = loglik + log_prior_theta(zeta, tau);
  return std::isfinite(total) ? total : kNegInf;
}

ChainState initialize(const Dataset& data, std::size_t knot_count) {
  const auto y = data.values();
  if (y.front() == y.back()) throw InputError("degenerate data: all observations are equal");
  ChainState s;
  s.zeta = 0.0;
  s.tau = std::log(data.median());
  s.omega.assign(knot_count, 0.0);
  return s;
}

}  // namespace lgptail
