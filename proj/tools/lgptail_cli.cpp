// Command-line front end: fit, fit-pot, simulate, study, summarize,
// xi-curve and bench. Exit codes: 0 success, 2 input error, 3 numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgptail/bench.hpp"
#include "lgptail/error.hpp"
#include "lgptail/gp_lowrank.hpp"
#include "lgptail/io.hpp"
#include "lgptail/model.hpp"
#include "lgptail/pot.hpp"
#include "lgptail/sampler.hpp"
#include "lgptail/simstudy.hpp"
#include "lgptail/summaries.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lgptail;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Collects configuration sources in precedence order: manifest, config
/// file, then individual flags.
struct ConfigSources {
  std::string manifest;
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> flags;

  void add_flag(CLI::App* app, const std::string& name, const std::string& key,
                const std::string& help) {
    app->add_option_function<std::string>(
        name, [this, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  }

  void add_common(CLI::App* app) {
    app->add_option("--manifest", manifest, "Start from the configuration stored in a manifest");
    app->add_option("--config", config_file, "Key = value configuration file");
    add_flag(app, "-i,--input", "input", "Input CSV (one value per line, optional date column)");
    add_flag(app, "-o,--output", "output", "Output file prefix");
    add_flag(app, "--seed", "seed", "Sampler seed");
    add_flag(app, "--n-iter", "n_iter", "MCMC iterations");
    add_flag(app, "--burn-in", "burn_in", "Burn-in iterations (default n_iter / 5)");
    add_flag(app, "--thin", "thin", "Thinning interval");
    add_flag(app, "--grid-size", "grid_size", "Grid size L");
    add_flag(app, "--knots", "knots", "Knot count m");
    add_flag(app, "--alpha-min", "alpha_min", "Lower bound of the tail index");
    add_flag(app, "--truncate-below", "truncate_below", "Drop records below this value");
    add_flag(app, "--jitter", "jitter_half_width", "Uniform jitter half-width");
    add_flag(app, "--support-shift", "support_shift", "Known lower support bound");
    add_flag(app, "--preprocess-seed", "preprocess_seed", "Jitter seed");
    add_flag(app, "--cache-dir", "cache_dir", "Directory for cached lambda grids");
    add_flag(app, "--threads", "threads", "Worker threads");
    app->add_option_function<std::vector<std::string>>(
        "--set",
        [this](const std::vector<std::string>& kvs) {
          for (const auto& kv : kvs) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InputError("--set expects key=value, got " + kv);
            flags.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
          }
        },
        "Override any configuration key (key=value)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!manifest.empty()) {
      const json m = read_json(manifest);
      if (!m.contains("config")) throw InputError(manifest + " has no config section");
      cfg = config_from_json(m.at("config"));
    }
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
    cfg.validate();
    return cfg;
  }
};

std::string compact(const json& j) { return j.dump(); }

json interval_json(const IntervalSummary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"lower95", s.lower}, {"upper95", s.upper}};
}

std::string with_suffix(const std::string& prefix, const std::string& suffix) {
  return prefix + suffix;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

Dataset load_dataset(const RunConfig& cfg, InputTable* table_out = nullptr) {
  if (cfg.input.empty()) throw InputError("no input file given (--input)");
  InputTable table = read_values_csv(cfg.input);
  Dataset data = preprocess(table.values, cfg.preprocess);
  if (table_out) *table_out = std::move(table);
  return data;
}

std::shared_ptr<const LambdaGrid> lambda_grid_for(const RunConfig& cfg) {
  const KnotSet knots = KnotSet::uniform(cfg.knot_count);
  const Grid grid = Grid::uniform(cfg.grid_size);
  return std::make_shared<const LambdaGrid>(
      LambdaGrid::cached(cfg.cache_dir, knots, grid, cfg.prior.lambda_prior()));
}

// fit

int cmd_fit(const ConfigSources& src) {
  const RunConfig cfg = src.resolve();
  InputTable table;
  auto data = std::make_shared<const Dataset>(load_dataset(cfg, &table));
  auto lgrid = lambda_grid_for(cfg);
  auto grid = std::make_shared<const Grid>(Grid::uniform(cfg.grid_size));
  SemiparametricModel model(data, lgrid, grid, cfg.prior);
  std::cerr << "fitting n=" << data->size() << " of N=" << data->provenance().original_count
            << " records, G=" << lgrid->size() << " lambda support points, "
            << cfg.sampler.n_iter << " iterations\n";
  const PosteriorDraws draws = run_chain(cfg.sampler, model);

  const json config = config_to_json(cfg);
  const json prov = provenance_to_json(data->provenance(), data->size());
  const std::string csv_path = with_suffix(cfg.output, ".draws.csv");
  const std::string bin_path = with_suffix(cfg.output, ".draws.bin");
  const std::string manifest_path = with_suffix(cfg.output, ".json");
  ensure_parent(manifest_path);
  write_draws_csv(csv_path, draws, cfg.prior.alpha_min,
                  compact({{"config", config}, {"provenance", prov}}));
  write_draws_binary(bin_path, draws);

  json acceptance = json::object();
  for (const auto& b : draws.blocks) acceptance[b.name] = b.acceptance();
  const IntervalSummary xi = xi_summary(draws, cfg.prior.alpha_min);
  std::size_t clamped_retained = 0;
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    const Eigen::VectorXd x = draws.draws.row(r).transpose();
    clamped_retained += model.clamped_points(ChainState::unpack(x));
  }
  json manifest = {
      {"command", "fit"},
      {"version", kVersion},
      {"config", config},
      {"provenance", prov},
      {"lambda_support", lgrid->size()},
      {"retained_draws", draws.rows()},
      {"acceptance", acceptance},
      {"clamped_retained", clamped_retained},
      {"clamped_evaluations", model.clamp_count()},
      {"xi", interval_json(xi)},
      {"outputs",
       {{"draws_csv", fs::path(csv_path).filename().string()},
        {"draws_bin", fs::path(bin_path).filename().string()}}},
  };
  if (!table.dates.empty()) manifest["dates"] = table.dates;
  write_json(manifest_path, manifest);

  std::cout << std::setprecision(4) << "xi mean " << xi.mean << "  95% [" << xi.lower << ", "
            << xi.upper << "]\n";
  for (const auto& b : draws.blocks) {
    std::cout << "acceptance " << b.name << " " << b.acceptance() << "\n";
  }
  std::cout << "wrote " << manifest_path << ", " << csv_path << ", " << bin_path << "\n";
  return 0;
}

// summarize

struct SummarizeOptions {
  std::string fit;
  std::string output;
  std::vector<double> p_list{1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> levels;
  double records_per_year = 365.25;
  std::vector<double> density_grid;  // from, to, count
  std::string cache_dir;
};

int cmd_summarize(const SummarizeOptions& opt) {
  const json manifest = read_json(opt.fit);
  RunConfig cfg = config_from_json(manifest.at("config"));
  if (!opt.cache_dir.empty()) cfg.cache_dir = opt.cache_dir;
  const Provenance prov = provenance_from_json(manifest.at("provenance"));
  const std::size_t fitted = manifest.at("provenance").at("fitted_count").get<std::size_t>();
  const fs::path bin = fs::path(opt.fit).parent_path() /
                       manifest.at("outputs").at("draws_bin").get<std::string>();
  const PosteriorDraws draws = read_draws_binary(bin);
  if (static_cast<std::size_t>(draws.draws.cols()) != cfg.knot_count + 2) {
    throw InputError("draws file does not match the knot count in the manifest");
  }
  auto lgrid = lambda_grid_for(cfg);
  auto grid = std::make_shared<const Grid>(Grid::uniform(cfg.grid_size));

  std::vector<FittedDensity> fits;
  fits.reserve(draws.rows());
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    const Eigen::VectorXd x = draws.draws.row(r).transpose();
    fits.push_back(fitted_density(ChainState::unpack(x), *lgrid, grid, cfg.prior,
                                  prov.support_shift));
  }
  const double q = prov.original_count == 0
                       ? 1.0
                       : static_cast<double>(fitted) / static_cast<double>(prov.original_count);

  std::string prefix = opt.output.empty() ? cfg.output + ".summary" : opt.output;
  ensure_parent(prefix);
  const json config = config_to_json(cfg);
  json out = {{"command", "summarize"}, {"version", kVersion}, {"config", config},
              {"provenance", manifest.at("provenance")}, {"fit_manifest", opt.fit},
              {"records_per_year", opt.records_per_year}, {"inclusion_fraction", q}};
  const std::string header = compact({{"config", config}, {"fit_manifest", opt.fit}});

  const IntervalSummary xi = xi_summary(draws, cfg.prior.alpha_min);
  out["xi"] = interval_json(xi);
  std::cout << std::setprecision(4) << "xi mean " << xi.mean << "  95% [" << xi.lower << ", "
            << xi.upper << "]\n";

  {
    const auto reports = quantile_report(fits, opt.p_list);
    std::ofstream os(prefix + ".quantiles.csv");
    os << "# " << header << "\np,estimate,lower95,upper95,mean\n" << std::setprecision(10);
    json arr = json::array();
    std::cout << "tail quantiles (posterior median, 95% interval)\n";
    for (const auto& r : reports) {
      os << r.p << ',' << r.estimate << ',' << r.lower95 << ',' << r.upper95 << ',' << r.mean
         << '\n';
      arr.push_back({{"p", r.p}, {"estimate", r.estimate}, {"lower95", r.lower95},
                     {"upper95", r.upper95}, {"mean", r.mean}});
      std::cout << "  p=" << r.p << "  " << r.estimate << "  [" << r.lower95 << ", "
                << r.upper95 << "]\n";
    }
    out["quantiles"] = arr;
  }
  if (!opt.levels.empty()) {
    std::ofstream os(prefix + ".return_periods.csv");
    os << "# " << header << "\nlevel,estimate_years,lower95,upper95,mean\n"
       << std::setprecision(10);
    json arr = json::array();
    std::cout << "return periods in years (posterior median, 95% interval)\n";
    for (double level : opt.levels) {
      const ReturnPeriod rp = return_period(fits, level, opt.records_per_year, q);
      os << level << ',' << rp.estimate << ',' << rp.lower95 << ',' << rp.upper95 << ','
         << rp.mean << '\n';
      arr.push_back({{"level", level}, {"estimate", rp.estimate}, {"lower95", rp.lower95},
                     {"upper95", rp.upper95}, {"mean", rp.mean}});
      std::cout << "  level=" << level << "  " << rp.estimate << "  [" << rp.lower95 << ", "
                << rp.upper95 << "]\n";
    }
    out["return_periods"] = arr;
  }
  if (!opt.density_grid.empty()) {
    if (opt.density_grid.size() != 3 || opt.density_grid[2] < 2) {
      throw InputError("--density-grid expects FROM TO COUNT");
    }
    std::vector<double> ys;
    const auto count = static_cast<std::size_t>(opt.density_grid[2]);
    for (std::size_t i = 0; i < count; ++i) {
      ys.push_back(opt.density_grid[0] + (opt.density_grid[1] - opt.density_grid[0]) *
                                             static_cast<double>(i) /
                                             static_cast<double>(count - 1));
    }
    std::ofstream os(prefix + ".density.csv");
    os << "# " << header << "\ny,mean,lower95,upper95\n" << std::setprecision(10);
    for (const auto& b : density_curve(fits, ys)) {
      os << b.y << ',' << b.mean << ',' << b.lower << ',' << b.upper << '\n';
    }
  }
  write_json(prefix + ".json", out);
  std::cout << "wrote " << prefix << ".*\n";
  return 0;
}

// fit-pot

struct PotOptions {
  double threshold = 0.0;
  std::size_t min_exceed = kDefaultMinExceedances;
  std::vector<double> p_list{1e-2, 1e-3, 1e-4, 1e-5};
};

int cmd_fit_pot(const ConfigSources& src, const PotOptions& opt) {
  const RunConfig cfg = src.resolve();
  const Dataset data = load_dataset(cfg);
  const PotFit fit = fit_pot(data.values(), opt.threshold, cfg.prior, cfg.sampler, opt.min_exceed);
  const IntervalSummary xi = summarize(fit.xi());
  const std::string prefix = cfg.output + ".pot";
  ensure_parent(prefix);
  json config = config_to_json(cfg);
  json out = {{"command", "fit-pot"}, {"version", kVersion}, {"config", config},
              {"provenance", provenance_to_json(data.provenance(), data.size())},
              {"threshold", fit.threshold}, {"min_exceedances", opt.min_exceed},
              {"exceedances", fit.exceedances}, {"exceed_fraction", fit.exceed_fraction},
              {"xi", interval_json(xi)}};
  std::cout << std::setprecision(4) << "threshold " << fit.threshold << ": k=" << fit.exceedances
            << "  xi mean " << xi.mean << "  95% [" << xi.lower << ", " << xi.upper << "]\n";
  std::vector<double> usable;
  for (double p : opt.p_list) {
    if (p <= fit.exceed_fraction) usable.push_back(p);
  }
  json arr = json::array();
  std::ofstream os(prefix + ".quantiles.csv");
  os << "# " << compact({{"config", config}, {"threshold", fit.threshold}})
     << "\np,estimate,lower95,upper95,mean\n" << std::setprecision(10);
  for (const auto& r : pot_quantile_report(fit, usable)) {
    os << r.p << ',' << r.estimate << ',' << r.lower95 << ',' << r.upper95 << ',' << r.mean
       << '\n';
    arr.push_back({{"p", r.p}, {"estimate", r.estimate}, {"lower95", r.lower95},
                   {"upper95", r.upper95}, {"mean", r.mean}});
  }
  out["quantiles"] = arr;
  write_json(prefix + ".json", out);
  std::cout << "wrote " << prefix << ".json\n";
  return 0;
}

// xi-curve

struct CurveOptions {
  double from = 0.005;
  double to = 3.0;
  double step = 0.025;
  std::size_t min_exceed = kDefaultMinExceedances;
};

int cmd_xi_curve(const ConfigSources& src, const CurveOptions& opt) {
  const RunConfig cfg = src.resolve();
  const Dataset data = load_dataset(cfg);
  const auto thresholds = threshold_grid(opt.from, opt.to, opt.step);
  std::cerr << "fitting " << thresholds.size() << " thresholds on " << cfg.threads
            << " thread(s)\n";
  const auto curve = pot_xi_curve(data.values(), thresholds, cfg.prior, cfg.sampler,
                                  opt.min_exceed, cfg.threads);
  const std::string path = cfg.output + ".xi_curve.csv";
  ensure_parent(path);
  const json config = config_to_json(cfg);
  std::ofstream os(path);
  os << "# "
     << compact({{"config", config},
                 {"grid", {{"from", opt.from}, {"to", opt.to}, {"step", opt.step}}},
                 {"min_exceedances", opt.min_exceed}})
     << "\nthreshold,k,xi_est,lo,hi\n" << std::setprecision(10);
  std::size_t gaps = 0;
  for (const auto& pt : curve) {
    os << pt.threshold << ',' << pt.exceedances << ',';
    if (pt.fitted) {
      os << pt.xi.mean << ',' << pt.xi.lower << ',' << pt.xi.upper << '\n';
    } else {
      os << ",,\n";
      ++gaps;
    }
  }
  std::cout << "wrote " << path << " (" << curve.size() - gaps << " fitted, " << gaps
            << " gaps)\n";
  return 0;
}

// simulate

struct SimulateOptions {
  std::string family = "gpd";
  double xi = 0.5;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string output = "-";
};

int cmd_simulate(const SimulateOptions& opt) {
  if (!(opt.xi > 0.0)) throw InputError("--xi must be positive");
  const SyntheticFamily family{parse_family(opt.family), 1.0 / opt.xi};
  Rng rng(opt.seed);
  const auto values = sample_family(family, opt.n, rng);
  const json header = {{"command", "simulate"}, {"family", opt.family}, {"xi", opt.xi},
                       {"n", opt.n}, {"seed", opt.seed}};
  if (opt.output == "-") {
    std::cout << "# " << compact(header) << "\nvalue\n" << std::setprecision(17);
    for (double v : values) std::cout << v << '\n';
  } else {
    ensure_parent(opt.output);
    write_values_csv(opt.output, values, compact(header));
  }
  return 0;
}

// study

struct StudyOptions {
  std::vector<std::string> families{"gpd"};
  std::vector<double> xis{0.5};
  std::string method = "both";
  std::size_t replicates = 20;
  std::size_t n = 1000;
  std::size_t n_iter = 20000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::vector<double> p_list{1e-2, 1e-3, 1e-4, 1e-5};
  double threshold_quantile = 0.9;
  bool full_scale = false;
  std::string output = "study";
  std::string cache_dir;
};

json replicate_json(const ReplicateResult& r) {
  json j = {{"index", r.index}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["xi"] = {{"estimate", r.xi_estimate}, {"lower95", r.xi_lower}, {"upper95", r.xi_upper}};
  j["q_true"] = r.q_true;
  j["q_estimate"] = r.q_estimate;
  j["q_lower95"] = r.q_lower;
  j["q_upper95"] = r.q_upper;
  j["acceptance"] = r.acceptance;
  j["clamped"] = r.clamped;
  j["clamped_evaluations"] = r.clamped_evaluations;
  if (r.threshold > 0.0) j["threshold"] = r.threshold;
  return j;
}

int cmd_study(StudyOptions opt) {
  if (opt.full_scale) {
    opt.replicates = 100;
    opt.n_iter = 500000;
    std::cerr << "full scale: 100 replicates of 500000 iterations per row; expect many hours "
                 "per row on one core\n";
  }
  std::vector<Method> methods;
  if (opt.method == "both") {
    methods = {Method::Semi, Method::Thresh};
  } else {
    methods = {parse_method(opt.method)};
  }
  PriorConfig prior;
  std::shared_ptr<const LambdaGrid> lgrid;
  const std::size_t grid_size = 101, knots = 11;

  const std::string csv_path = opt.output + ".csv";
  ensure_parent(csv_path);
  json rows = json::array();
  std::ostringstream table;
  table << std::setprecision(6);
  table << "family,xi,method,bias,rmse,coverage";
  for (double p : opt.p_list) table << ",rmae_" << p << ",cover_" << p;
  table << ",replicates,failures,clamped,valid\n";

  for (const auto& fam : opt.families) {
    for (double xi : opt.xis) {
      for (Method method : methods) {
        ExperimentSpec spec;
        spec.family = parse_family(fam);
        spec.xi_true = xi;
        spec.n = opt.n;
        spec.replicates = opt.replicates;
        spec.p_list = opt.p_list;
        spec.method = method;
        spec.seed = opt.seed;
        spec.sampler.n_iter = opt.n_iter;
        spec.prior = prior;
        spec.grid_size = grid_size;
        spec.knot_count = knots;
        spec.threshold_quantile = opt.threshold_quantile;
        spec.threads = opt.threads;
        if (method == Method::Semi && !lgrid) {
          lgrid = std::make_shared<const LambdaGrid>(
              LambdaGrid::cached(opt.cache_dir, KnotSet::uniform(knots), Grid::uniform(grid_size),
                                 prior.lambda_prior()));
        }
        std::cerr << "running " << fam << " xi=" << xi << " " << method_name(method) << "\n";
        const ExperimentResult res = run_experiment(spec, lgrid);
        const MetricsRow& m = res.metrics;
        table << fam << ',' << xi << ',' << method_name(method) << ',' << m.bias << ',' << m.rmse
              << ',' << m.coverage;
        json qs = json::array();
        for (const auto& q : m.quantiles) {
          table << ',' << q.rmae << ',' << q.coverage;
          qs.push_back({{"p", q.p}, {"rmae", q.rmae}, {"coverage", q.coverage}});
        }
        for (std::size_t k = m.quantiles.size(); k < opt.p_list.size(); ++k) table << ",,";
        table << ',' << m.replicates << ',' << m.failures << ',' << m.clamped << ','
              << (m.valid ? "true" : "false") << '\n';
        json reps = json::array();
        for (const auto& r : res.replicates) reps.push_back(replicate_json(r));
        rows.push_back({{"family", fam}, {"xi", xi}, {"method", method_name(method)},
                        {"bias", m.bias}, {"rmse", m.rmse}, {"coverage", m.coverage},
                        {"quantiles", qs}, {"failures", m.failures}, {"clamped", m.clamped},
                        {"valid", m.valid}, {"replicates", reps}});
      }
    }
  }

  const json spec_json = {{"families", opt.families}, {"xi", opt.xis}, {"method", opt.method},
                          {"replicates", opt.replicates}, {"n", opt.n}, {"n_iter", opt.n_iter},
                          {"seed", opt.seed}, {"p", opt.p_list},
                          {"threshold_rule", "fixed empirical quantile"},
                          {"threshold_quantile", opt.threshold_quantile},
                          {"grid_size", grid_size}, {"knots", knots},
                          {"seed_scheme", "splitmix64(seed, 2i) data, (seed, 2i+1) chain"}};
  {
    std::ofstream os(csv_path);
    os << "# " << compact(spec_json) << '\n' << table.str();
  }
  write_json(opt.output + ".json",
             {{"command", "study"}, {"version", kVersion}, {"spec", spec_json}, {"rows", rows}});
  std::cout << table.str();
  return 0;
}

// bench

struct BenchOptions {
  std::string mode = "all";
  std::size_t n_iter = 20000;
  std::uint64_t seed = 1;
  std::string output;
  std::string cache_dir;
};

int cmd_bench(const BenchOptions& opt) {
  if (opt.mode != "all" && opt.mode != "likelihood" && opt.mode != "chain") {
    throw InputError("--mode must be likelihood, chain or all");
  }
  PriorConfig prior;
  std::ostringstream csv;
  csv << std::setprecision(6) << "kind,n,m,L,G,iterations,seconds\n";
  auto lgrid_for = [&](std::size_t m, std::size_t L) {
    return std::make_shared<const LambdaGrid>(LambdaGrid::cached(
        opt.cache_dir, KnotSet::uniform(m), Grid::uniform(L), prior.lambda_prior()));
  };
  if (opt.mode == "likelihood" || opt.mode == "all") {
    struct Case { std::size_t n, m, L; bool same_support; };
    const std::vector<Case> cases = {{1000, 11, 101, false}, {2000, 11, 101, false},
                                     {1000, 21, 101, false}, {1000, 21, 101, true},
                                     {1000, 11, 201, false}};
    auto base = lgrid_for(11, 101);
    for (const auto& c : cases) {
      std::shared_ptr<const LambdaGrid> lg;
      if (c.same_support) {
        std::vector<double> w;
        for (const auto& e : base->entries()) w.push_back(std::exp(e.log_weight));
        lg = std::make_shared<const LambdaGrid>(LambdaGrid::from_support(
            KnotSet::uniform(c.m), Grid::uniform(c.L), base->lambdas(), w));
      } else {
        lg = (c.m == 11 && c.L == 101) ? base : lgrid_for(c.m, c.L);
      }
      auto grid = std::make_shared<const Grid>(Grid::uniform(c.L));
      const EvalTiming t = time_log_posterior(lg, grid, c.n, prior, opt.seed);
      csv << "log_posterior" << (c.same_support ? "_fixed_support" : "") << ',' << t.n << ','
          << t.knots << ',' << t.grid_size << ',' << t.support << ",1," << t.seconds_per_eval
          << '\n';
    }
  }
  if (opt.mode == "chain" || opt.mode == "all") {
    auto lg = lgrid_for(11, 101);
    auto grid = std::make_shared<const Grid>(Grid::uniform(101));
    for (std::size_t n : {1061, 3645, 6180}) {
      const ChainTiming t = time_chain(lg, grid, n, opt.n_iter, prior, opt.seed);
      csv << "chain," << t.n << ",11,101," << lg->size() << ',' << t.iterations << ','
          << t.seconds << '\n';
      std::cerr << "chain n=" << n << " " << t.seconds << " s\n";
    }
  }
  std::cout << csv.str();
  if (!opt.output.empty()) {
    ensure_parent(opt.output);
    std::ofstream(opt.output) << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiparametric Bayesian heavy-tailed density and tail estimation", "lgptail"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ConfigSources fit_src, pot_src, curve_src;
  auto* fit = app.add_subcommand("fit", "Fit the semiparametric model and store posterior draws");
  fit_src.add_common(fit);

  SummarizeOptions sum_opt;
  auto* sum = app.add_subcommand("summarize", "Tail quantiles, return periods and densities");
  sum->add_option("-f,--fit", sum_opt.fit, "Manifest written by fit")->required();
  sum->add_option("-o,--output", sum_opt.output, "Output prefix");
  sum->add_option("-p,--p", sum_opt.p_list, "Exceedance probabilities")->delimiter(',');
  sum->add_option("--levels", sum_opt.levels, "Return levels in data units")->delimiter(',');
  sum->add_option("--records-per-year", sum_opt.records_per_year, "Records per year");
  sum->add_option("--density-grid", sum_opt.density_grid, "FROM TO COUNT for a density curve")
      ->expected(3);
  sum->add_option("--cache-dir", sum_opt.cache_dir, "Directory for cached lambda grids");

  PotOptions pot_opt;
  auto* pot = app.add_subcommand("fit-pot", "Bayesian GPD fit to excesses over a threshold");
  pot_src.add_common(pot);
  pot->add_option("-t,--threshold", pot_opt.threshold, "Threshold")->required();
  pot->add_option("--min-exceed", pot_opt.min_exceed, "Minimum number of exceedances");
  pot->add_option("-p,--p", pot_opt.p_list, "Exceedance probabilities")->delimiter(',');

  CurveOptions curve_opt;
  auto* curve = app.add_subcommand("xi-curve", "Threshold sweep of the GPD tail estimate");
  curve_src.add_common(curve);
  curve->add_option("--from", curve_opt.from, "First threshold");
  curve->add_option("--to", curve_opt.to, "Last threshold");
  curve->add_option("--step", curve_opt.step, "Threshold increment");
  curve->add_option("--min-exceed", curve_opt.min_exceed, "Minimum number of exceedances");

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "Draw a synthetic sample");
  sim->add_option("--family", sim_opt.family, "gpd, gpd4 or halft");
  sim->add_option("--xi", sim_opt.xi, "Extreme value index 1/alpha");
  sim->add_option("-n,--n", sim_opt.n, "Sample size");
  sim->add_option("--seed", sim_opt.seed, "Seed");
  sim->add_option("-o,--output", sim_opt.output, "Output CSV ('-' for stdout)");

  StudyOptions study_opt;
  auto* study = app.add_subcommand("study", "Simulation study with bias, RMSE and coverage");
  study->add_option("--family", study_opt.families, "Families (gpd, gpd4, halft)")->delimiter(',');
  study->add_option("--xi", study_opt.xis, "True extreme value indices")->delimiter(',');
  study->add_option("--method", study_opt.method, "semi, thresh or both");
  study->add_option("--replicates", study_opt.replicates, "Replicates per row");
  study->add_option("-n,--n", study_opt.n, "Sample size");
  study->add_option("--n-iter", study_opt.n_iter, "MCMC iterations per fit");
  study->add_option("--seed", study_opt.seed, "Base seed");
  study->add_option("--threads", study_opt.threads, "Worker threads");
  study->add_option("-p,--p", study_opt.p_list, "Exceedance probabilities")->delimiter(',');
  study->add_option("--threshold-quantile", study_opt.threshold_quantile,
                    "Empirical quantile used as the threshold");
  study->add_flag("--full-scale", study_opt.full_scale, "100 replicates, 500000 iterations");
  study->add_option("-o,--output", study_opt.output, "Output prefix");
  study->add_option("--cache-dir", study_opt.cache_dir, "Directory for cached lambda grids");

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "Time likelihood evaluations and chains");
  bench->add_option("--mode", bench_opt.mode, "likelihood, chain or all");
  bench->add_option("--n-iter", bench_opt.n_iter, "Iterations per timed chain");
  bench->add_option("--seed", bench_opt.seed, "Seed");
  bench->add_option("-o,--output", bench_opt.output, "Also write the CSV here");
  bench->add_option("--cache-dir", bench_opt.cache_dir, "Directory for cached lambda grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit) return cmd_fit(fit_src);
    if (*sum) return cmd_summarize(sum_opt);
    if (*pot) return cmd_fit_pot(pot_src, pot_opt);
    if (*curve) return cmd_xi_curve(curve_src, curve_opt);
    if (*sim) return cmd_simulate(sim_opt);
    if (*study) return cmd_study(study_opt);
    if (*bench) return cmd_bench(bench_opt);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
