#include "lgptail/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lgptail/error.hpp"

namespace lgptail {

std::size_t SamplerConfig::retained() const {
  return (n_iter - burn_in_iters()) / thin;
}

void SamplerConfig::validate() const {
  if (n_iter == 0) throw InputError("n_iter must be positive");
  if (burn_in_iters() >= n_iter) throw InputError("burn_in must be smaller than n_iter");
  if (thin == 0) throw InputError("thin must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw InputError("target_accept must lie in (0, 1)");
  }
  if (!(adapt_decay > 0.5 && adapt_decay <= 1.0)) {
    throw InputError("adapt_decay must lie in (0.5, 1]");
  }
  if (!(adapt_offset >= 0.0)) throw InputError("adapt_offset must be nonnegative");
  if (!(init_scale > 0.0) || !(cov_regularization > 0.0)) {
    throw InputError("init_scale and cov_regularization must be positive");
  }
}

namespace {

struct BlockState {
  const Block* block = nullptr;
  Eigen::Index dim = 0;
  double log_scale = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd chol;  // lower factor of cov + regularization
  double regularization = 0.0;

  void refactor() {
    Eigen::MatrixXd reg = cov;
    reg.diagonal().array() += regularization;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    double extra = regularization;
    while (llt.info() != Eigen::Success) {
      extra *= 10.0;
      reg = cov;
      reg.diagonal().array() += extra;
      llt.compute(reg);
      if (extra > 1e6) throw NumericalError("proposal covariance is not positive definite");
    }
    chol = llt.matrixL();
  }
};

}  // namespace

PosteriorDraws run_adaptive_metropolis(const LogDensity& target, const Eigen::VectorXd& init,
                                       const std::vector<Block>& blocks,
                                       const SamplerConfig& config,
                                       std::vector<std::string> columns) {
  config.validate();
  if (blocks.empty()) throw InputError("sampler needs at least one block");
  const Eigen::Index dim = init.size();
  for (const auto& b : blocks) {
    if (b.indices.empty()) throw InputError("block '" + b.name + "' is empty");
    for (auto i : b.indices) {
      if (i < 0 || i >= dim) throw InputError("block '" + b.name + "' index out of range");
    }
  }

  Eigen::VectorXd x = init;
  double lp = target(x);
  if (!std::isfinite(lp)) throw NumericalError("initial log posterior is not finite");

  std::vector<BlockState> states(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& st = states[b];
    st.block = &blocks[b];
    st.dim = static_cast<Eigen::Index>(blocks[b].indices.size());
    st.log_scale = std::log(2.38 / std::sqrt(static_cast<double>(st.dim)));
    st.mean.resize(st.dim);
    for (Eigen::Index k = 0; k < st.dim; ++k) st.mean[k] = x[blocks[b].indices[static_cast<std::size_t>(k)]];
    st.cov = Eigen::MatrixXd::Identity(st.dim, st.dim) * (config.init_scale * config.init_scale);
    st.regularization = config.cov_regularization;
    st.refactor();
  }

  const std::size_t burn = config.burn_in_iters();
  const std::size_t keep = config.retained();
  PosteriorDraws out;
  out.columns = std::move(columns);
  out.draws.resize(static_cast<Eigen::Index>(keep), dim);
  out.log_post.reserve(keep);
  out.blocks.resize(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out.blocks[b].name = blocks[b].name;
    out.blocks[b].log_scale_trace.reserve(keep);
  }

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd z, step, xb, diff;
  std::size_t stored = 0;
  for (std::size_t t = 1; t <= config.n_iter; ++t) {
    const double gamma = std::pow(static_cast<double>(t) + config.adapt_offset, -config.adapt_decay);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& st = states[b];
      const auto& idx = blocks[b].indices;
      z.resize(st.dim);
      for (Eigen::Index k = 0; k < st.dim; ++k) z[k] = normal(rng);
      step.noalias() = std::exp(st.log_scale) * (st.chol * z);
      Eigen::VectorXd y = x;
      for (Eigen::Index k = 0; k < st.dim; ++k) y[idx[static_cast<std::size_t>(k)]] += step[k];

      const double lp_y = target(y);
      double accept_prob = 0.0;
      if (std::isfinite(lp_y)) accept_prob = lp_y >= lp ? 1.0 : std::exp(lp_y - lp);
      const bool accepted = unif(rng) < accept_prob;
      if (accepted) {
        x = std::move(y);
        lp = lp_y;
      }

      if (config.adapt) {
        st.log_scale += gamma * (accept_prob - config.target_accept);
        xb.resize(st.dim);
        for (Eigen::Index k = 0; k < st.dim; ++k) xb[k] = x[idx[static_cast<std::size_t>(k)]];
        diff = xb - st.mean;
        st.mean += gamma * diff;
        st.cov += gamma * (diff * diff.transpose() - st.cov);
        st.refactor();
      }
      if (t > burn) {
        ++out.blocks[b].proposed;
        if (accepted) ++out.blocks[b].accepted;
      }
    }
    if (t > burn && (t - burn) % config.thin == 0 && stored < keep) {
      out.draws.row(static_cast<Eigen::Index>(stored)) = x.transpose();
      out.log_post.push_back(lp);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        out.blocks[b].log_scale_trace.push_back(states[b].log_scale);
      }
      ++stored;
    }
  }
  return out;
}

std::vector<Block> semiparametric_blocks(std::size_t knot_count) {
  Block omega{"omega", {}};
  for (std::size_t j = 0; j < knot_count; ++j) omega.indices.push_back(static_cast<Eigen::Index>(j + 2));
  Block theta{"theta", {0, 1}};
  Block all{"joint", {}};
  for (std::size_t j = 0; j < knot_count + 2; ++j) all.indices.push_back(static_cast<Eigen::Index>(j));
  return {omega, theta, all};
}

std::vector<std::string> semiparametric_columns(std::size_t knot_count) {
  std::vector<std::string> cols{"zeta", "tau"};
  for (std::size_t j = 0; j < knot_count; ++j) cols.push_back("omega_" + std::to_string(j + 1));
  return cols;
}

PosteriorDraws run_chain(const SamplerConfig& config, const SemiparametricModel& model,
                         std::optional<ChainState> init) {
  const ChainState start = init ? *init : initialize(model.data(), model.knot_count());
  if (start.omega.size() != model.knot_count()) {
    throw InputError("initial state has the wrong number of knot values");
  }
  auto target = model.make_target();
  LogDensity fn = [&target](const Eigen::VectorXd& x) { return target(x); };
  return run_adaptive_metropolis(fn, start.pack(), semiparametric_blocks(model.knot_count()),
                                 config, semiparametric_columns(model.knot_count()));
}

PosteriorDraws run_gpd_chain(const SamplerConfig& config, std::span<const double> values,
                             const PriorConfig& prior, double init_tau) {
  LogDensity fn = [values, &prior](const Eigen::VectorXd& x) {
    return gpd_only_log_posterior(x[0], x[1], values, prior);
  };
  Eigen::VectorXd init(2);
  init << 0.0, init_tau;
  return run_adaptive_metropolis(fn, init, {Block{"theta", {0, 1}}}, config, {"zeta", "tau"});
}

double batch_means_se(std::span<const double> trace, std::size_t batches) {
  const std::size_t n = trace.size();
  if (n < 2) return 0.0;
  batches = std::clamp<std::size_t>(batches, 2, n);
  const std::size_t len = n / batches;
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double m = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) m += trace[i];
    m /= static_cast<double>(len);
    ss += (m - mean) * (m - mean);
  }
  const double var_batch = ss / static_cast<double>(batches - 1);
  return std::sqrt(var_batch / static_cast<double>(batches));
}

}  // namespace lgptail
