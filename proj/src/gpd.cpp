#include "lgptail/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "lgptail/error.hpp"

namespace lgptail {

namespace {

void check_theta(ThetaParam theta) {
  if (!(theta.alpha > 0.0) || !(theta.sigma > 0.0) || !std::isfinite(theta.alpha) ||
      !std::isfinite(theta.sigma)) {
    throw DomainError("GPD parameters must be positive and finite");
  }
}

void check_support(double y) {
  if (!(y >= 0.0)) throw DomainError("GPD evaluated at negative or NaN y");
}

// log(1 + y / (alpha sigma))
double log_base(ThetaParam theta, double y) {
  return std::log1p(y / (theta.alpha * theta.sigma));
}

}  // namespace

double gpd_log_pdf(ThetaParam theta, double y) {
  check_theta(theta);
  check_support(y);
  return -std::log(theta.sigma) - (theta.alpha + 1.0) * log_base(theta, y);
}

double gpd_pdf(ThetaParam theta, double y) {
  check_theta(theta);
  check_support(y);
  return std::pow(1.0 + y / (theta.alpha * theta.sigma), -(theta.alpha + 1.0)) / theta.sigma;
}

double gpd_log_survival(ThetaParam theta, double y) {
  check_theta(theta);
  check_support(y);
  return -theta.alpha * log_base(theta, y);
}

double gpd_survival(ThetaParam theta, double y) {
  return std::exp(gpd_log_survival(theta, y));
}

double gpd_cdf(ThetaParam theta, double y) {
  return -std::expm1(gpd_log_survival(theta, y));
}

double gpd_upper_quantile(ThetaParam theta, double p) {
  check_theta(theta);
  if (!(p > 0.0) || p > 1.0) throw DomainError("upper quantile requires p in (0, 1]");
  p = std::max(p, kQuantileClamp);
  // alpha sigma (p^{-1/alpha} - 1)
  return theta.alpha * theta.sigma * std::expm1(-std::log(p) / theta.alpha);
}

double gpd_quantile(ThetaParam theta, double q) {
  if (!(q >= 0.0) || q >= 1.0) throw DomainError("GPD quantile requires q in [0, 1)");
  if (q == 0.0) return 0.0;
  check_theta(theta);
  const double q_clamped = std::min(q, 1.0 - kQuantileClamp);
  return theta.alpha * theta.sigma * std::expm1(-std::log1p(-q_clamped) / theta.alpha);
}

DensityOracle gpd_oracle(ThetaParam theta) {
  check_theta(theta);
  return {[theta](double y) { return gpd_pdf(theta, y); },
          [theta](double y) { return gpd_survival(theta, y); }};
}

double psi_from_density(const DensityOracle& f, ThetaParam theta, double u) {
  if (!(u >= 0.0) || !(u < 1.0)) throw DomainError("psi_from_density requires u in [0, 1)");
  const double y = gpd_quantile(theta, u);
  return f.pdf(y) / gpd_pdf(theta, y);
}

double halft_pdf(double alpha, double y) {
  if (!(alpha > 0.0)) throw DomainError("half-t requires alpha > 0");
  if (!(y >= 0.0)) throw DomainError("half-t evaluated at negative y");
  const double log_c = std::lgamma(0.5 * (alpha + 1.0)) - std::lgamma(0.5 * alpha) -
                       0.5 * std::log(alpha * std::numbers::pi);
  return 2.0 * std::exp(log_c - 0.5 * (alpha + 1.0) * std::log1p(y * y / alpha));
}

double halft_survival(double alpha, double y) {
  if (!(alpha > 0.0)) throw DomainError("half-t requires alpha > 0");
  if (!(y >= 0.0)) throw DomainError("half-t evaluated at negative y");
  if (y == 0.0) return 1.0;
  // P(|T| > y) = I_{alpha / (alpha + y^2)}(alpha / 2, 1 / 2)
  const double x = alpha / (alpha + y * y);
  return boost::math::ibeta(0.5 * alpha, 0.5, x);
}

std::string_view family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Gpd: return "gpd";
    case FamilyKind::Gpd4: return "gpd4";
    case FamilyKind::HalfT: return "halft";
  }
  return "unknown";
}

FamilyKind parse_family(std::string_view name) {
  if (name == "gpd" || name == "GPD") return FamilyKind::Gpd;
  if (name == "gpd4" || name == "GPD4") return FamilyKind::Gpd4;
  if (name == "halft" || name == "half-t" || name == "Half-t") return FamilyKind::HalfT;
  throw InputError("unknown family '" + std::string(name) + "' (expected gpd, gpd4, halft)");
}

DensityOracle family_oracle(SyntheticFamily family) {
  const double alpha = family.alpha;
  switch (family.kind) {
    case FamilyKind::Gpd:
      return gpd_oracle({alpha, 1.0});
    case FamilyKind::Gpd4: {
      const ThetaParam unit{alpha, 1.0};
      return {[unit](double y) {
                const double g = gpd_cdf(unit, y);
                return 4.0 * gpd_pdf(unit, y) * g * g * g;
              },
              [unit](double y) {
                // 1 - G^4 = (1 - G)(1 + G)(1 + G^2)
                const double g = gpd_cdf(unit, y);
                return gpd_survival(unit, y) * (1.0 + g) * (1.0 + g * g);
              }};
    }
    case FamilyKind::HalfT:
      return {[alpha](double y) { return halft_pdf(alpha, y); },
              [alpha](double y) { return halft_survival(alpha, y); }};
  }
  throw DomainError("unknown family");
}

std::vector<double> sample_gpd(ThetaParam theta, std::size_t n, Rng& rng) {
  check_theta(theta);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& y : out) {
    // 1 - U lies in (0, 1]
    y = gpd_upper_quantile(theta, 1.0 - unif(rng));
  }
  return out;
}

std::vector<double> sample_gpd4(double alpha, std::size_t n, Rng& rng) {
  const ThetaParam unit{alpha, 1.0};
  check_theta(unit);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& y : out) {
    double best = 0.0;
    for (int k = 0; k < 4; ++k) best = std::max(best, gpd_upper_quantile(unit, 1.0 - unif(rng)));
    y = best;
  }
  return out;
}

std::vector<double> sample_halft(double alpha, std::size_t n, Rng& rng) {
  if (!(alpha > 0.0)) throw DomainError("half-t requires alpha > 0");
  std::student_t_distribution<double> t(alpha);
  std::vector<double> out(n);
  for (auto& y : out) y = std::abs(t(rng));
  return out;
}

std::vector<double> sample_family(SyntheticFamily family, std::size_t n, Rng& rng) {
  switch (family.kind) {
    case FamilyKind::Gpd: return sample_gpd({family.alpha, 1.0}, n, rng);
    case FamilyKind::Gpd4: return sample_gpd4(family.alpha, n, rng);
    case FamilyKind::HalfT: return sample_halft(family.alpha, n, rng);
  }
  throw DomainError("unknown family");
}

}  // namespace lgptail
