#include "lgptail/gp_lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "lgptail/error.hpp"

namespace lgptail {

KnotSet KnotSet::uniform(std::size_t m) {
  if (m < 2) throw DomainError("knot set needs at least two knots");
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  s.front() = 0.0;
  s.back() = 1.0;
  return KnotSet(std::move(s));
}

KnotSet::KnotSet(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw DomainError("knot set is empty");
  if (knots_.size() == 1) {
    if (!(knots_[0] >= 0.0 && knots_[0] <= 1.0)) throw DomainError("knot outside [0, 1]");
    return;
  }
  if (knots_.front() != 0.0 || knots_.back() != 1.0) {
    throw DomainError("knot set must include the endpoints 0 and 1");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw DomainError("knots must be distinct and sorted");
  }
}

double sq_exp_kernel(double lambda, double u, double v) {
  if (!(lambda > 0.0)) throw DomainError("kernel requires lambda > 0");
  const double d = u - v;
  return std::exp(-lambda * lambda * d * d);
}

double lambda_for_correlation(double rho, double distance) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("correlation must lie in (0, 1)");
  return std::sqrt(-std::log(rho)) / distance;
}

double correlation_for_lambda(double lambda, double distance) {
  return sq_exp_kernel(lambda, 0.0, distance);
}

Eigen::MatrixXd kernel_matrix(double lambda, std::span<const double> rows,
                              std::span<const double> cols, double jitter) {
  if (!(lambda > 0.0)) throw DomainError("kernel requires lambda > 0");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd k(nr, nc);
  const double l2 = lambda * lambda;
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      const double d = rows[static_cast<std::size_t>(i)] - cols[static_cast<std::size_t>(j)];
      k(i, j) = std::exp(-l2 * d * d);
    }
  }
  if (jitter != 0.0 && nr == nc) k.diagonal().array() += jitter;
  return k;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& c, const char* which) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string("matrix ") + which + " is not symmetric positive definite");
  }
  return llt;
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double gauss_kl(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1) {
  if (c0.rows() != c1.rows() || c0.cols() != c1.cols() || c0.rows() != c0.cols()) {
    throw DomainError("gauss_kl requires square matrices of equal size");
  }
  const auto llt0 = spd_factor(c0, "c0");
  const auto llt1 = spd_factor(c1, "c1");
  const double trace = llt1.solve(c0).trace();
  const double m = static_cast<double>(c0.rows());
  const double kl = 0.5 * (trace - m + log_det_from_llt(llt1) - log_det_from_llt(llt0));
  return std::max(0.0, kl);
}

namespace {

LambdaGrid::Entry make_entry(double lambda, std::span<const double> knots,
                             std::span<const double> grid_points, double jitter) {
  LambdaGrid::Entry e;
  e.lambda = lambda;
  const Eigen::MatrixXd cs = kernel_matrix(lambda, knots, knots, jitter);
  const auto llt = spd_factor(cs, "C_S");
  e.chol = llt.matrixL();
  e.log_det = log_det_from_llt(llt);
  const Eigen::MatrixXd cts = kernel_matrix(lambda, grid_points, knots);
  e.project = llt.solve(cts.transpose()).transpose();
  // Grid points that coincide with knots reproduce the knot value exactly.
  for (std::size_t i = 0; i < grid_points.size(); ++i) {
    for (std::size_t j = 0; j < knots.size(); ++j) {
      if (std::abs(grid_points[i] - knots[j]) < 1e-12) {
        e.project.row(static_cast<Eigen::Index>(i)).setZero();
        e.project(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      }
    }
  }
  return e;
}

double gamma_cdf(GammaPrior prior, double x) {
  if (x <= 0.0) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  return boost::math::gamma_p(prior.shape, prior.rate * x);
}

}  // namespace

LambdaGrid LambdaGrid::from_support(const KnotSet& knots, const Grid& grid,
                                    std::span<const double> lambdas,
                                    std::span<const double> weights, double jitter) {
  if (lambdas.empty() || lambdas.size() != weights.size()) {
    throw DomainError("lambda support and weights must be nonempty and of equal size");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("lambda weights must be positive");
    total += w;
  }
  LambdaGrid out;
  out.knots_.assign(knots.points().begin(), knots.points().end());
  out.grid_points_.assign(grid.points().begin(), grid.points().end());
  out.options_.jitter = jitter;
  out.prior_ = {0.0, 0.0};
  for (std::size_t g = 0; g < lambdas.size(); ++g) {
    auto e = make_entry(lambdas[g], out.knots_, out.grid_points_, jitter);
    e.log_weight = std::log(weights[g] / total);
    out.entries_.push_back(std::move(e));
  }
  return out;
}

LambdaGrid LambdaGrid::build(const KnotSet& knots, const Grid& grid, GammaPrior prior,
                             const LambdaGridOptions& options) {
  if (!(prior.shape > 0.0) || !(prior.rate > 0.0)) {
    throw DomainError("lambda prior needs positive shape and rate");
  }
  if (!(options.rho_start > options.rho_stop) || !(options.rho_stop > 0.0) ||
      !(options.rho_start < 1.0) || !(options.kl_step > 0.0)) {
    throw DomainError("lambda grid options need 1 > rho_start > rho_stop > 0 and kl_step > 0");
  }
  const auto s = knots.points();
  auto cov = [&](double rho) {
    return kernel_matrix(lambda_for_correlation(rho, options.rho_distance), s, s, options.jitter);
  };

  std::vector<double> rhos{options.rho_start};
  constexpr int kMaxHalvings = 200;
  constexpr std::size_t kMaxPoints = 100000;
  while (rhos.back() > options.rho_stop) {
    const double rho_prev = rhos.back();
    const Eigen::MatrixXd c_prev = cov(rho_prev);
    double rho_next = options.rho_stop;
    double kl = gauss_kl(c_prev, cov(rho_next));
    int halvings = 0;
    while (kl > options.kl_step) {
      if (++halvings > kMaxHalvings) {
        std::ostringstream msg;
        msg << "lambda grid step search failed after rho=" << rho_prev << " (lambda="
            << lambda_for_correlation(rho_prev, options.rho_distance) << "), last KL=" << kl;
        throw NumericalError(msg.str());
      }
      rho_next = 0.5 * (rho_prev + rho_next);
      kl = gauss_kl(c_prev, cov(rho_next));
    }
    rhos.push_back(rho_next);
    if (rhos.size() > kMaxPoints) throw NumericalError("lambda grid did not terminate");
  }

  LambdaGrid out;
  out.knots_.assign(s.begin(), s.end());
  out.grid_points_.assign(grid.points().begin(), grid.points().end());
  out.prior_ = prior;
  out.options_ = options;

  std::vector<double> lambdas;
  lambdas.reserve(rhos.size());
  for (double rho : rhos) lambdas.push_back(lambda_for_correlation(rho, options.rho_distance));

  // Prior mass of each Voronoi cell, split at geometric midpoints.
  const std::size_t count = lambdas.size();
  std::vector<double> edges(count + 1);
  edges.front() = 0.0;
  edges.back() = std::numeric_limits<double>::infinity();
  for (std::size_t g = 1; g < count; ++g) edges[g] = std::sqrt(lambdas[g - 1] * lambdas[g]);
  std::vector<double> mass(count);
  double total = 0.0;
  for (std::size_t g = 0; g < count; ++g) {
    mass[g] = gamma_cdf(prior, edges[g + 1]) - gamma_cdf(prior, edges[g]);
    total += mass[g];
  }

  for (std::size_t g = 0; g < count; ++g) {
    auto e = make_entry(lambdas[g], out.knots_, out.grid_points_, options.jitter);
    e.log_weight = std::log(mass[g] / total);
    out.entries_.push_back(std::move(e));
  }
  return out;
}

std::vector<double> LambdaGrid::lambdas() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.lambda);
  return out;
}

namespace {

constexpr char kMagic[8] = {'L', 'G', 'P', 'T', 'L', 'A', 'M', 'B'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

void write_doubles(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

bool read_doubles(std::istream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  return static_cast<bool>(is);
}

}  // namespace

void LambdaGrid::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write lambda grid cache " + path.string());
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, kCacheVersion);
  const std::uint64_t m = knots_.size(), l = grid_points_.size(), g = entries_.size();
  write_pod(os, m);
  write_pod(os, l);
  write_doubles(os, knots_.data(), knots_.size());
  write_doubles(os, grid_points_.data(), grid_points_.size());
  const double key[] = {prior_.shape,         prior_.rate,     options_.rho_start,
                        options_.rho_stop,    options_.kl_step, options_.rho_distance,
                        options_.jitter};
  write_doubles(os, key, std::size(key));
  write_pod(os, g);
  for (const auto& e : entries_) {
    write_pod(os, e.lambda);
    write_pod(os, e.log_weight);
    write_pod(os, e.log_det);
    write_doubles(os, e.project.data(), static_cast<std::size_t>(e.project.size()));
    write_doubles(os, e.chol.data(), static_cast<std::size_t>(e.chol.size()));
  }
  if (!os) throw InputError("failed writing lambda grid cache " + path.string());
}

bool LambdaGrid::load(const std::filesystem::path& path, const KnotSet& knots, const Grid& grid,
                      GammaPrior prior, const LambdaGridOptions& options, LambdaGrid& out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) return false;
  std::uint32_t version = 0;
  if (!read_pod(is, version) || version != kCacheVersion) return false;
  std::uint64_t m = 0, l = 0, g = 0;
  if (!read_pod(is, m) || !read_pod(is, l)) return false;
  if (m != knots.size() || l != grid.size()) return false;
  LambdaGrid tmp;
  tmp.knots_.resize(m);
  tmp.grid_points_.resize(l);
  if (!read_doubles(is, tmp.knots_.data(), m) || !read_doubles(is, tmp.grid_points_.data(), l)) {
    return false;
  }
  if (!std::equal(tmp.knots_.begin(), tmp.knots_.end(), knots.points().begin()) ||
      !std::equal(tmp.grid_points_.begin(), tmp.grid_points_.end(), grid.points().begin())) {
    return false;
  }
  double key[7];
  if (!read_doubles(is, key, 7)) return false;
  const double want[] = {prior.shape,       prior.rate,      options.rho_start,
                         options.rho_stop,  options.kl_step, options.rho_distance,
                         options.jitter};
  if (!std::equal(std::begin(key), std::end(key), std::begin(want))) return false;
  tmp.prior_ = prior;
  tmp.options_ = options;
  if (!read_pod(is, g) || g == 0 || g > 1000000) return false;
  const auto mi = static_cast<Eigen::Index>(m), li = static_cast<Eigen::Index>(l);
  for (std::uint64_t i = 0; i < g; ++i) {
    Entry e;
    if (!read_pod(is, e.lambda) || !read_pod(is, e.log_weight) || !read_pod(is, e.log_det)) {
      return false;
    }
    e.project.resize(li, mi);
    e.chol.resize(mi, mi);
    if (!read_doubles(is, e.project.data(), static_cast<std::size_t>(e.project.size())) ||
        !read_doubles(is, e.chol.data(), static_cast<std::size_t>(e.chol.size()))) {
      return false;
    }
    tmp.entries_.push_back(std::move(e));
  }
  out = std::move(tmp);
  return true;
}

std::string LambdaGrid::cache_name(const KnotSet& knots, const Grid& grid, GammaPrior prior) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "lambda_grid_m%zu_L%zu_a%.6g_b%.6g.bin", knots.size(),
                grid.size(), prior.shape, prior.rate);
  return buf;
}

LambdaGrid LambdaGrid::cached(const std::filesystem::path& cache_dir, const KnotSet& knots,
                              const Grid& grid, GammaPrior prior,
                              const LambdaGridOptions& options) {
  if (cache_dir.empty()) return build(knots, grid, prior, options);
  const auto path = cache_dir / cache_name(knots, grid, prior);
  LambdaGrid out;
  if (load(path, knots, grid, prior, options, out)) return out;
  out = build(knots, grid, prior, options);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  out.save(path);
  return out;
}

KnotFieldEval evaluate_knot_field(std::span<const double> omega_knots, const LambdaGrid& grid,
                                  double a_kappa, double b_kappa) {
  const std::size_t m = grid.knot_count();
  if (omega_knots.size() != m) {
    throw DomainError("knot field has " + std::to_string(omega_knots.size()) +
                      " values, expected " + std::to_string(m));
  }
  const Eigen::Map<const Eigen::VectorXd> omega(omega_knots.data(), static_cast<Eigen::Index>(m));
  const double md = static_cast<double>(m);
  const double log_const = std::lgamma(a_kappa + 0.5 * md) - std::lgamma(a_kappa) -
                           0.5 * md * std::log(2.0 * std::numbers::pi * b_kappa);

  const std::size_t count = grid.size();
  std::vector<double> lp(count);
  double lp_max = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < count; ++g) {
    const auto& e = grid[g];
    const Eigen::VectorXd z = e.chol.triangularView<Eigen::Lower>().solve(omega);
    const double quad = z.squaredNorm();
    lp[g] = e.log_weight + log_const - 0.5 * e.log_det -
            (a_kappa + 0.5 * md) * std::log1p(quad / (2.0 * b_kappa));
    lp_max = std::max(lp_max, lp[g]);
  }
  double sum = 0.0;
  for (double v : lp) sum += std::exp(v - lp_max);

  KnotFieldEval out;
  out.log_prior = lp_max + std::log(sum);
  out.weights.resize(count);
  out.omega_grid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.grid_size()));
  for (std::size_t g = 0; g < count; ++g) {
    const double w = std::exp(lp[g] - lp_max) / sum;
    out.weights[g] = w;
    if (w > 0.0) out.omega_grid.noalias() += w * (grid[g].project * omega);
  }
  return out;
}

double marginal_log_prior(std::span<const double> omega_knots, const LambdaGrid& grid,
                          double a_kappa, double b_kappa) {
  return evaluate_knot_field(omega_knots, grid, a_kappa, b_kappa).log_prior;
}

std::vector<double> mixture_weights(std::span<const double> omega_knots, const LambdaGrid& grid,
                                    double a_kappa, double b_kappa) {
  return evaluate_knot_field(omega_knots, grid, a_kappa, b_kappa).weights;
}

std::vector<double> predictive_project(std::span<const double> omega_knots,
                                       const LambdaGrid& grid, double a_kappa, double b_kappa) {
  const auto eval = evaluate_knot_field(omega_knots, grid, a_kappa, b_kappa);
  return {eval.omega_grid.begin(), eval.omega_grid.end()};
}

}  // namespace lgptail
