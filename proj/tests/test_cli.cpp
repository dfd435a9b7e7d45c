#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oxg/cli.hpp"

using oxg::cli::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "oxg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = oxg::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line) && !line.empty()) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, FitGlassFibres) {
  const auto r = invoke({"fit", "--data", "glass-fibres", "--baseline", "exponential"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const char* key : {"params", "log_likelihood", "aic", "converged", "iterations"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["aic"].get<double>(), 32.092, 0.02);
  EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(Cli, NumbersRoundTrip) {
  const auto r = invoke({"quantile", "--lambda", "1", "--theta", "1", "--u", "0.3"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  const double x = j["x"].get<double>();
  const oxg::OxgParams p(1.0, oxg::BaselineModel::exponential(1.0));
  EXPECT_EQ(x, oxg::quantile(p, 0.3));
  EXPECT_NE(r.out.find(oxg::cli::fmt17(x)), std::string::npos);
}

TEST(Cli, QuantileEchoesCheck) {
  const auto r = invoke({"quantile", "--u", "0.5", "--lambda", "1", "--baseline", "exponential",
                         "--theta", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["check_cdf"].get<double>(), 0.5, 1e-9);
}

TEST(Cli, ReliabilityOfIdenticalLaws) {
  const auto r = invoke({"reliability", "--lambda1", "1", "--lambda2", "1", "--baseline",
                         "exponential", "--theta", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["R"].get<double>(), 0.5, 1e-10);
}

TEST(Cli, EvalReportsAllFunctions) {
  const auto r = invoke({"eval", "--lambda", "1", "--baseline", "uniform", "--theta", "2", "--x", "1"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["pdf"].get<double>(), 1.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(j["hazard"].get<double>() * j["survival"].get<double>(), j["pdf"].get<double>(), 1e-14);
  const auto edge = invoke({"eval", "--lambda", "1", "--baseline", "uniform", "--theta", "2", "--x", "0"});
  EXPECT_TRUE(json::parse(edge.out)["hazard"].is_null());
}

TEST(Cli, UsageErrors) {
  auto r = invoke({"quantile", "--baseline", "exponential"});
  EXPECT_EQ(r.code, oxg::cli::exit_usage);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "usage");
  r = invoke({"bogus"});
  EXPECT_EQ(r.code, oxg::cli::exit_usage);
  r = invoke({"quantile", "--lambda", "-1", "--theta", "1", "--u", "0.5"});
  EXPECT_EQ(r.code, oxg::cli::exit_usage);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "parameter");
  r = invoke({"quantile", "--lambda", "1", "--theta", "1", "--u", "1.5"});
  EXPECT_EQ(r.code, oxg::cli::exit_usage);
  r = invoke({"lorenz"});
  EXPECT_EQ(r.code, oxg::cli::exit_usage);
}

TEST(Cli, DataErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "oxg_cli_test";
  std::filesystem::create_directories(dir);
  const auto empty = dir / "empty.txt";
  std::ofstream(empty).close();
  auto r = invoke({"fit", "--data", empty.string()});
  EXPECT_EQ(r.code, oxg::cli::exit_data);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "data");
  r = invoke({"fit", "--data", "no-such-dataset"});
  EXPECT_EQ(r.code, oxg::cli::exit_data);
  const auto flat = dir / "flat.txt";
  std::ofstream(flat) << "2 2 2\n";
  r = invoke({"fit", "--data", flat.string()});
  EXPECT_EQ(r.code, oxg::cli::exit_data);
}

TEST(Cli, NonConvergenceExitCode) {
  const auto r = invoke({"moments", "--lambda", "1", "--baseline", "uniform", "--theta", "1",
                         "--method", "series"});
  EXPECT_EQ(r.code, oxg::cli::exit_convergence);
  EXPECT_FALSE(json::parse(r.out)["converged"].get<bool>());
}

TEST(Cli, SeriesCommandsConvergeWhereTheyShould) {
  const auto r = invoke({"moments", "--lambda", "1", "--baseline", "uniform", "--theta", "1",
                         "--t", "0.5", "--mgf-at", "0.1", "--u", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.contains("incomplete_moment"));
  EXPECT_TRUE(j.contains("mgf"));
  EXPECT_TRUE(j.contains("lorenz"));
  const auto e = invoke({"entropy", "--lambda", "1", "--theta", "1", "--beta", "2"});
  EXPECT_EQ(e.code, 0);
  const auto o = invoke({"order-stat", "--lambda", "0.4", "--theta", "1", "--r", "2", "--n", "3",
                         "--x", "0.5", "--method", "series"});
  EXPECT_EQ(o.code, 0) << o.err;
  const auto oj = json::parse(o.out);
  EXPECT_NEAR(oj["series"]["value"].get<double>(), oj["density"].get<double>(), 1e-6);
  const auto res = invoke({"residual", "--lambda", "1", "--baseline", "uniform", "--theta", "1",
                           "--t", "0.3"});
  EXPECT_EQ(res.code, 0);
  const auto g = invoke({"gof", "--data", "indometh"});
  EXPECT_EQ(g.code, 0);
  EXPECT_GT(json::parse(g.out)["ks"].get<double>(), 0.0);
}

TEST(Cli, SampleIsSeeded) {
  const auto a = invoke({"sample", "--lambda", "1", "--theta", "1", "--n", "50", "--seed", "7"});
  const auto b = invoke({"sample", "--lambda", "1", "--theta", "1", "--n", "50", "--seed", "7"});
  const auto c = invoke({"sample", "--lambda", "1", "--theta", "1", "--n", "50", "--seed", "8"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  std::string header;
  EXPECT_EQ(read_csv(a.out, &header).size(), 50u);
  EXPECT_EQ(header, "x");
}

TEST(Cli, PlotDataGrid) {
  const auto r = invoke({"plot-data", "--lambda", "0.087", "--theta", "2.19"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = read_csv(r.out, &header);
  EXPECT_EQ(header, "x,pdf,cdf,survival,hazard,reversed_hazard");
  ASSERT_EQ(rows.size(), 512u);
  double area = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) EXPECT_TRUE(std::isfinite(v));
    if (i) {
      EXPECT_GT(rows[i][0], rows[i - 1][0]);
      EXPECT_GE(rows[i][2], rows[i - 1][2]);
      area += 0.5 * (rows[i][1] + rows[i - 1][1]) * (rows[i][0] - rows[i - 1][0]);
    }
  }
  EXPECT_NEAR(area, 1.0, 1e-3);
}

TEST(Cli, PlotDataWritesHistogramBesideOutput) {
  const auto dir = std::filesystem::temp_directory_path() / "oxg_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = dir / "glass.csv";
  const auto r = invoke({"plot-data", "--data", "glass-fibres", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto hist = read_csv(slurp(dir / "glass-histogram.csv"));
  double count = 0.0;
  for (const auto& row : hist) count += row[2];
  EXPECT_EQ(count, 63.0);
  EXPECT_EQ(read_csv(slurp(out)).size(), 512u);
}

TEST(Cli, DatasetsListing) {
  const auto r = invoke({"datasets"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["builtin"][0]["n"], 63);
  EXPECT_EQ(j["builtin"][1]["n"], 66);
}

TEST(Cli, Help) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--baseline"), std::string::npos);
}
