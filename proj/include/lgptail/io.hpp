#pragma once

// Data ingestion, run configuration and persistence of posterior draws.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lgptail/model.hpp"
#include "lgptail/priors.hpp"
#include "lgptail/sampler.hpp"

namespace lgptail {

struct PreprocessConfig {
  double truncate_below = 0.0;     ///< records below this value are dropped
  double jitter_half_width = 0.0;  ///< Uniform(-h, h) noise added to kept records
  double support_shift = 0.0;      ///< lower support bound a, subtracted before fitting
  std::uint64_t seed = 1;
};

/// Truncate, jitter and shift raw nonnegative records. Throws InputError on
/// negative or non-finite input, an empty result, or a nonpositive value
/// after shifting.
Dataset preprocess(std::span<const double> raw, const PreprocessConfig& config);

struct InputTable {
  std::vector<double> values;
  std::vector<std::string> dates;  ///< second column when present
  bool has_header = false;
};

/// One value per line, optional header, optional second (date) column.
InputTable read_values_csv(const std::filesystem::path& path);
/// A non-empty `comment` is written first as a single '#' line.
void write_values_csv(const std::filesystem::path& path, std::span<const double> values,
                      std::string_view comment = {});

struct RunConfig {
  std::size_t grid_size = 101;
  std::size_t knot_count = 11;
  PriorConfig prior{};
  SamplerConfig sampler{};
  PreprocessConfig preprocess{};
  std::string input;
  std::string output = "fit";
  std::string cache_dir;
  std::size_t threads = 1;

  /// Throws InputError; requires grid_size >= 2 * knot_count.
  void validate() const;
};

/// Sets one flat key (e.g. "n_iter", "a_lambda") from its text value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
/// Applies `key = value` lines ('#' starts a comment). Throws InputError.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json provenance_to_json(const Provenance& p, std::size_t fitted_count);
Provenance provenance_from_json(const nlohmann::json& j);

/// zeta, tau, alpha, sigma, xi, omega_1..omega_m, log_post
void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws,
                     double alpha_min, std::string_view comment = {});
/// Compact little-endian binary of the draw matrix and log-posterior trace.
void write_draws_binary(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws read_draws_binary(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Parse "a,b,c" or whitespace separated numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace lgptail
