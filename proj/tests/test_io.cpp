#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgptail/error.hpp"
#include "lgptail/io.hpp"

using namespace lgptail;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "lgptail_io_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Preprocess, TruncationKeepsOneValue) {
  const std::vector<double> raw{0.01, 0.05};
  PreprocessConfig c;
  c.truncate_below = 0.03;
  const Dataset d = preprocess(raw, c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.values()[0], 0.05);
  EXPECT_EQ(d.provenance().original_count, 2u);
  EXPECT_DOUBLE_EQ(d.inclusion_fraction(), 0.5);
}

TEST(Preprocess, ZeroJitterIsIdentity) {
  const std::vector<double> raw{0.3, 0.1, 2.0};
  const Dataset d = preprocess(raw, {});
  EXPECT_EQ(std::vector<double>(d.values().begin(), d.values().end()), (std::vector<double>{0.1, 0.3, 2.0}));
}

TEST(Preprocess, JitterBoundedAndSeeded) {
  std::vector<double> raw(500);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = 0.03 + 0.01 * static_cast<double>(i);
  PreprocessConfig c;
  c.jitter_half_width = 0.005;
  c.seed = 3;
  const Dataset a = preprocess(raw, c), b = preprocess(raw, c);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  // Spacing 0.01 exceeds twice the half-width, so sorted order matches raw order.
  bool moved = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_LE(std::abs(a.values()[i] - raw[i]), 0.005);
    moved = moved || a.values()[i] != raw[i];
  }
  EXPECT_TRUE(moved);
  c.seed = 4;
  const Dataset e = preprocess(raw, c);
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), e.values().begin()));
}

TEST(Preprocess, ShiftAndErrors) {
  PreprocessConfig c;
  c.support_shift = 0.5;
  const std::vector<double> raw{1.0, 2.0};
  EXPECT_DOUBLE_EQ(preprocess(raw, c).values()[0], 0.5);
  EXPECT_DOUBLE_EQ(preprocess(raw, c).provenance().support_shift, 0.5);
  c.support_shift = 1.0;
  EXPECT_NE(error_text([&] { preprocess(raw, c); }).find("1"), std::string::npos);
  EXPECT_THROW(preprocess(raw, c), InputError);
  EXPECT_THROW(preprocess(std::vector<double>{1.0, -1.0}, {}), InputError);
  EXPECT_THROW(preprocess(std::vector<double>{}, {}), InputError);
  PreprocessConfig t;
  t.truncate_below = 10.0;
  EXPECT_THROW(preprocess(raw, t), InputError);
}

TEST(ValuesCsv, HeaderCommentsAndDates) {
  const auto p = temp_file("v.csv", "# station 1\nprecip,date\n0.5,1900-01-01\n\n1.25,1900-01-02\n");
  const auto t = read_values_csv(p);
  EXPECT_TRUE(t.has_header);
  EXPECT_EQ(t.values, (std::vector<double>{0.5, 1.25}));
  EXPECT_EQ(t.dates, (std::vector<std::string>{"1900-01-01", "1900-01-02"}));
  const auto q = read_values_csv(temp_file("w.csv", "1\n2\n3\n"));
  EXPECT_FALSE(q.has_header);
  EXPECT_EQ(q.values.size(), 3u);
  EXPECT_TRUE(q.dates.empty());
}

TEST(ValuesCsv, ErrorsNameTheLine) {
  const auto p = temp_file("bad.csv", "value\n1.0\nabc\n");
  const std::string msg = error_text([&] { read_values_csv(p); });
  EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
  EXPECT_THROW(read_values_csv(p), InputError);
  EXPECT_THROW(read_values_csv(temp_file("empty.csv", "value\n")), InputError);
  EXPECT_THROW(read_values_csv("/nonexistent/file.csv"), InputError);
}

TEST(ValuesCsv, WriteReadRoundtrip) {
  const fs::path p = fs::temp_directory_path() / "lgptail_io_test" / "rt.csv";
  const std::vector<double> v{0.1, 2.5e-7, 123456.789};
  write_values_csv(p, v, "{\"seed\":1}");
  EXPECT_EQ(slurp(p).rfind("# {\"seed\":1}\nvalue\n", 0), 0u);
  EXPECT_EQ(read_values_csv(p).values, v);
}

TEST(Config, SetKeysAndValidation) {
  RunConfig c;
  set_config_value(c, "n_iter", "1234");
  set_config_value(c, "a_lambda", "12.5");
  set_config_value(c, "knots", "5");
  set_config_value(c, "truncate_below", "0.03");
  EXPECT_EQ(c.sampler.n_iter, 1234u);
  EXPECT_EQ(c.prior.a_lambda, 12.5);
  EXPECT_EQ(c.knot_count, 5u);
  EXPECT_EQ(c.preprocess.truncate_below, 0.03);
  EXPECT_THROW(set_config_value(c, "no_such_key", "1"), InputError);
  EXPECT_THROW(set_config_value(c, "n_iter", "many"), InputError);
  RunConfig d;
  EXPECT_NO_THROW(d.validate());
  d.knot_count = 60;
  EXPECT_THROW(d.validate(), InputError);
}

TEST(Config, FileAndJsonRoundtrip) {
  const auto p = temp_file("run.cfg", "# comment\nn_iter = 777\nseed=9   # trailing\n\ngrid_size = 201\n");
  RunConfig c;
  apply_config_file(c, p);
  EXPECT_EQ(c.sampler.n_iter, 777u);
  EXPECT_EQ(c.sampler.seed, 9u);
  EXPECT_EQ(c.grid_size, 201u);
  const RunConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.sampler.burn_in_iters(), c.sampler.burn_in_iters());
  EXPECT_THROW(apply_config_file(c, temp_file("bad.cfg", "n_iter 5\n")), InputError);
}

TEST(Config, ProvenanceRoundtrip) {
  Provenance p;
  p.truncate_below = 0.03;
  p.jitter_half_width = 0.005;
  p.support_shift = 0.0;
  p.seed = 5;
  p.original_count = 36524;
  const auto j = provenance_to_json(p, 6180);
  EXPECT_EQ(j.at("fitted_count"), 6180);
  const Provenance q = provenance_from_json(j);
  EXPECT_EQ(q.original_count, 36524u);
  EXPECT_EQ(q.truncate_below, 0.03);
  EXPECT_EQ(q.seed, 5u);
}

TEST(Draws, BinaryRoundtripAndCsvColumns) {
  PosteriorDraws d;
  d.columns = {"zeta", "tau", "omega_1", "omega_2"};
  d.draws = Eigen::MatrixXd::Random(6, 4);
  d.log_post = {1, 2, 3, 4, 5, 6};
  const fs::path dir = fs::temp_directory_path() / "lgptail_io_test";
  write_draws_binary(dir / "d.bin", d);
  const PosteriorDraws e = read_draws_binary(dir / "d.bin");
  EXPECT_EQ(e.draws, d.draws);
  EXPECT_EQ(e.log_post, d.log_post);
  EXPECT_EQ(e.columns, d.columns);
  EXPECT_THROW(read_draws_binary(temp_file("junk.bin", "not a draws file")), InputError);

  write_draws_csv(dir / "d.csv", d, 0.5, "meta");
  std::ifstream in(dir / "d.csv");
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  EXPECT_EQ(first, "# meta");
  EXPECT_EQ(header, "zeta,tau,alpha,sigma,xi,omega_1,omega_2,log_post");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Json, WriteReadAndNumberLists) {
  const fs::path p = fs::temp_directory_path() / "lgptail_io_test" / "x.json";
  write_json(p, nlohmann::json{{"a", 1.5}});
  EXPECT_EQ(read_json(p).at("a"), 1.5);
  EXPECT_THROW(read_json(temp_file("bad.json", "{oops")), InputError);
  EXPECT_EQ(parse_number_list("1e-2, 1e-3 1e-4"), (std::vector<double>{1e-2, 1e-3, 1e-4}));
  EXPECT_THROW(parse_number_list("1,x"), InputError);
}
