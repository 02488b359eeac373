#pragma once

// Generalized Pareto mathematics (location 0, tail index alpha, scale sigma)
// and the synthetic heavy-tailed families used by the simulation study.

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lgptail {

using Rng = std::mt19937_64;

/// Quantile levels are clamped to this distance from 1.
inline constexpr double kQuantileClamp = 1e-12;

struct ThetaParam {
  double alpha = 2.0;  ///< tail index
  double sigma = 1.0;  ///< scale, data units

  double xi() const { return 1.0 / alpha; }
};

double gpd_pdf(ThetaParam theta, double y);
double gpd_log_pdf(ThetaParam theta, double y);
double gpd_cdf(ThetaParam theta, double y);
/// 1 - G(y), computed without cancellation.
double gpd_survival(ThetaParam theta, double y);
double gpd_log_survival(ThetaParam theta, double y);

/// Inverse cdf. q is clamped to at most 1 - kQuantileClamp; q outside [0, 1)
/// throws DomainError.
double gpd_quantile(ThetaParam theta, double q);
/// Level exceeded with probability p, i.e. gpd_quantile(theta, 1 - p) without
/// forming 1 - p. p in (0, 1].
double gpd_upper_quantile(ThetaParam theta, double p);

/// A density on (0, inf) known pointwise, with its survival function.
struct DensityOracle {
  std::function<double(double)> pdf;
  std::function<double(double)> survival;
};

DensityOracle gpd_oracle(ThetaParam theta);

/// psi(u) = f(G^{-1}(u)) / g(G^{-1}(u)): the density of G_theta(Y) when Y ~ f.
/// u in [0, 1).
double psi_from_density(const DensityOracle& f, ThetaParam theta, double u);

// Half-t with alpha degrees of freedom: density of |T|, T ~ t_alpha.
double halft_pdf(double alpha, double y);
double halft_survival(double alpha, double y);

enum class FamilyKind { Gpd, Gpd4, HalfT };

struct SyntheticFamily {
  FamilyKind kind = FamilyKind::Gpd;
  double alpha = 2.0;
};

std::string_view family_name(FamilyKind kind);
FamilyKind parse_family(std::string_view name);

/// pdf and survival of a synthetic family (GPD and GPD4 at unit scale).
DensityOracle family_oracle(SyntheticFamily family);

std::vector<double> sample_gpd(ThetaParam theta, std::size_t n, Rng& rng);
/// Max of four independent GPD(alpha, 1) draws; density 4 g G^3.
std::vector<double> sample_gpd4(double alpha, std::size_t n, Rng& rng);
std::vector<double> sample_halft(double alpha, std::size_t n, Rng& rng);
std::vector<double> sample_family(SyntheticFamily family, std::size_t n, Rng& rng);

}  // namespace lgptail
