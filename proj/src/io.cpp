#include "lgptail/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "lgptail/error.hpp"

namespace lgptail {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_double(trim(value), v)) throw InputError("config key '" + key + "': not a number: " + value);
  return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  std::size_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError("config key '" + key + "': not a nonnegative integer: " + value);
  }
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError("config key '" + key + "': not an unsigned integer: " + value);
  }
  return v;
}

}  // namespace

Dataset preprocess(std::span<const double> raw, const PreprocessConfig& config) {
  if (!(config.jitter_half_width >= 0.0)) throw InputError("jitter half-width must be nonnegative");
  std::vector<double> kept;
  kept.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = raw[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("record " + std::to_string(i) + " is negative or not finite (" +
                       std::to_string(v) + ")");
    }
    if (v >= config.truncate_below) kept.push_back(v);
  }
  if (kept.empty()) throw InputError("no records left after truncation");
  if (config.jitter_half_width > 0.0) {
    Rng rng(config.seed);
    std::uniform_real_distribution<double> noise(-config.jitter_half_width, config.jitter_half_width);
    for (auto& v : kept) v += noise(rng);
  }
  for (auto& v : kept) {
    const double shifted = v - config.support_shift;
    if (!(shifted > 0.0)) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "value " << v << " is not above the support shift "
          << config.support_shift;
      throw InputError(msg.str());
    }
    v = shifted;
  }
  Provenance prov;
  prov.truncate_below = config.truncate_below;
  prov.jitter_half_width = config.jitter_half_width;
  prov.support_shift = config.support_shift;
  prov.seed = config.seed;
  prov.original_count = raw.size();
  return Dataset(std::move(kept), prov);
}

InputTable read_values_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open input file " + path.string());
  InputTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = line.find(',');
    const std::string head = trim(std::string_view(line).substr(0, comma));
    double v = 0.0;
    if (!parse_double(head, v)) {
      if (first) {
        table.has_header = true;
        first = false;
        continue;
      }
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + head + "'");
    }
    first = false;
    table.values.push_back(v);
    if (comma != std::string::npos) {
      table.dates.push_back(trim(std::string_view(line).substr(comma + 1)));
    } else if (!table.dates.empty()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": missing date column");
    }
  }
  if (table.values.empty()) throw InputError(path.string() + ": no values found");
  if (!table.dates.empty() && table.dates.size() != table.values.size()) {
    throw InputError(path.string() + ": date column present on only some rows");
  }
  return table;
}

void write_values_csv(const std::filesystem::path& path, std::span<const double> values,
                      std::string_view comment) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "value\n" << std::setprecision(17);
  for (double v : values) os << v << '\n';
}

void RunConfig::validate() const {
  if (knot_count < 2) throw InputError("knot count must be at least 2");
  if (grid_size < 2 * knot_count) throw InputError("grid size must be at least twice the knot count");
  prior.validate();
  sampler.validate();
  if (!(preprocess.jitter_half_width >= 0.0)) throw InputError("jitter half-width must be nonnegative");
}

void set_config_value(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "grid_size") c.grid_size = to_size(key, value);
  else if (key == "knots" || key == "knot_count") c.knot_count = to_size(key, value);
  else if (key == "alpha_min") c.prior.alpha_min = to_double(key, value);
  else if (key == "a_kappa") c.prior.a_kappa = to_double(key, value);
  else if (key == "b_kappa") c.prior.b_kappa = to_double(key, value);
  else if (key == "a_lambda") c.prior.a_lambda = to_double(key, value);
  else if (key == "b_lambda") c.prior.b_lambda = to_double(key, value);
  else if (key == "n_iter") c.sampler.n_iter = to_size(key, value);
  else if (key == "burn_in") c.sampler.burn_in = to_size(key, value);
  else if (key == "thin") c.sampler.thin = to_size(key, value);
  else if (key == "target_accept") c.sampler.target_accept = to_double(key, value);
  else if (key == "adapt_decay") c.sampler.adapt_decay = to_double(key, value);
  else if (key == "adapt_offset") c.sampler.adapt_offset = to_double(key, value);
  else if (key == "seed") c.sampler.seed = to_u64(key, value);
  else if (key == "truncate_below") c.preprocess.truncate_below = to_double(key, value);
  else if (key == "jitter_half_width") c.preprocess.jitter_half_width = to_double(key, value);
  else if (key == "support_shift") c.preprocess.support_shift = to_double(key, value);
  else if (key == "preprocess_seed") c.preprocess.seed = to_u64(key, value);
  else if (key == "input") c.input = trim(value);
  else if (key == "output") c.output = trim(value);
  else if (key == "cache_dir") c.cache_dir = trim(value);
  else if (key == "threads") c.threads = to_size(key, value);
  else throw InputError("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["grid_size"] = c.grid_size;
  j["knots"] = c.knot_count;
  j["alpha_min"] = c.prior.alpha_min;
  j["a_kappa"] = c.prior.a_kappa;
  j["b_kappa"] = c.prior.b_kappa;
  j["a_lambda"] = c.prior.a_lambda;
  j["b_lambda"] = c.prior.b_lambda;
  j["n_iter"] = c.sampler.n_iter;
  j["burn_in"] = c.sampler.burn_in_iters();
  j["thin"] = c.sampler.thin;
  j["target_accept"] = c.sampler.target_accept;
  j["adapt_decay"] = c.sampler.adapt_decay;
  j["adapt_offset"] = c.sampler.adapt_offset;
  j["seed"] = c.sampler.seed;
  j["truncate_below"] = c.preprocess.truncate_below;
  j["jitter_half_width"] = c.preprocess.jitter_half_width;
  j["support_shift"] = c.preprocess.support_shift;
  j["preprocess_seed"] = c.preprocess.seed;
  j["input"] = c.input;
  j["output"] = c.output;
  j["cache_dir"] = c.cache_dir;
  j["threads"] = c.threads;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      set_config_value(c, key, value.get<std::string>());
    } else if (value.is_number_unsigned() || value.is_number_integer()) {
      set_config_value(c, key, std::to_string(value.get<std::int64_t>()));
    } else if (value.is_number_float()) {
      std::ostringstream os;
      os << std::setprecision(17) << value.get<double>();
      set_config_value(c, key, os.str());
    } else {
      throw InputError("config key '" + key + "' has an unsupported JSON type");
    }
  }
  return c;
}

nlohmann::json provenance_to_json(const Provenance& p, std::size_t fitted_count) {
  return {{"truncate_below", p.truncate_below},
          {"jitter_half_width", p.jitter_half_width},
          {"support_shift", p.support_shift},
          {"seed", p.seed},
          {"original_count", p.original_count},
          {"fitted_count", fitted_count}};
}

Provenance provenance_from_json(const nlohmann::json& j) {
  Provenance p;
  try {
    p.truncate_below = j.at("truncate_below").get<double>();
    p.jitter_half_width = j.at("jitter_half_width").get<double>();
    p.support_shift = j.at("support_shift").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.original_count = j.at("original_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed provenance: ") + e.what());
  }
  return p;
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws,
                     double alpha_min, std::string_view comment) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  if (!comment.empty()) os << "# " << comment << '\n';
  const auto cols = draws.draws.cols();
  os << "zeta,tau,alpha,sigma,xi";
  for (Eigen::Index c = 2; c < cols; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    os << ',' << (idx < draws.columns.size() ? draws.columns[idx] : "omega_" + std::to_string(c - 1));
  }
  os << ",log_post\n" << std::setprecision(17);
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    const ThetaParam th = theta_from_coords(draws.draws(r, 0), draws.draws(r, 1), alpha_min);
    os << draws.draws(r, 0) << ',' << draws.draws(r, 1) << ',' << th.alpha << ',' << th.sigma << ','
       << th.xi();
    for (Eigen::Index c = 2; c < cols; ++c) os << ',' << draws.draws(r, c);
    os << ',' << draws.log_post[static_cast<std::size_t>(r)] << '\n';
  }
  if (!os) throw InputError("failed writing " + path.string());
}

namespace {
constexpr char kDrawMagic[8] = {'L', 'G', 'P', 'T', 'D', 'R', 'W', '1'};
}

void write_draws_binary(const std::filesystem::path& path, const PosteriorDraws& draws) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os.write(kDrawMagic, sizeof(kDrawMagic));
  const std::uint64_t rows = static_cast<std::uint64_t>(draws.draws.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(draws.draws.cols());
  os.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  os.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws.draws.cols(); ++c) {
      const double v = draws.draws(r, c);
      os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  os.write(reinterpret_cast<const char*>(draws.log_post.data()),
           static_cast<std::streamsize>(draws.log_post.size() * sizeof(double)));
  if (!os) throw InputError("failed writing " + path.string());
}

PosteriorDraws read_draws_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open draws file " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kDrawMagic, sizeof(magic)) != 0) {
    throw InputError(path.string() + " is not a draws file");
  }
  std::uint64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  is.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!is || cols < 2 || cols > 100000 || rows > (1ULL << 32)) {
    throw InputError(path.string() + ": corrupt header");
  }
  PosteriorDraws d;
  d.draws.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < d.draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.draws.cols(); ++c) {
      double v = 0.0;
      is.read(reinterpret_cast<char*>(&v), sizeof(v));
      d.draws(r, c) = v;
    }
  }
  d.log_post.resize(rows);
  is.read(reinterpret_cast<char*>(d.log_post.data()), static_cast<std::streamsize>(rows * sizeof(double)));
  if (!is) throw InputError(path.string() + ": truncated draws file");
  d.columns = semiparametric_columns(static_cast<std::size_t>(cols) - 2);
  return d;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    const std::string t = trim(token);
    token.clear();
    if (t.empty()) return;
    double v = 0.0;
    if (!parse_double(t, v)) throw InputError("not a number: '" + t + "'");
    out.push_back(v);
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  return out;
}

}  // namespace lgptail
