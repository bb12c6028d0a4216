#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cli/commands.hpp"
#include "cli_support.hpp"

using namespace seastate;
using namespace seastate::cli;
namespace fs = std::filesystem;

TEST_CASE("range parsing") {
  CHECK(parse_range("0..3", "--m4") == std::vector<int>{0, 1, 2, 3});
  CHECK(parse_range("0,1,2", "--m3") == std::vector<int>{0, 1, 2});
  CHECK(parse_range(" 7 ", "--m4") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_range("3..1", "--m4"), ConfigError);
  CHECK_THROWS_AS(parse_range("", "--m4"), ConfigError);
  CHECK_THROWS_AS(parse_range("a,b", "--m4"), ConfigError);
}

TEST_CASE("grid expansion") {
  RunConfig c;
  c.input = "x.csv";
  c.m1 = {2};
  c.m3 = {0, 1, 2};
  c.m4 = parse_range("0..11", "--m4");
  const auto grid = expand_grid(c, nullptr);
  CHECK(grid.size() == 36);
  CHECK(grid[13].order_tuple() == std::vector<int>{2, 0, 1, 1});

  RunConfig d;
  d.input = "x.csv";
  d.trig_period = 24;
  d.m4 = {23};
  d.period2 = 168;
  d.m5 = parse_range("0..23", "--m5");
  const auto dual = expand_grid(d, nullptr);
  CHECK(dual.size() == 24);
  CHECK(dual[5].trig[1].order == 5);
  CHECK(dual[5].trig[1].excluded.count(7) == 1);
  CHECK(dual[5].trig[1].order_counts_retained);
}

TEST_CASE("config validation exits with code 2 before fitting") {
  testcli::Workspace ws("config");
  const auto data = ws.write_monthly("d.csv", 48, 1);
  auto r = testcli::run_cli({"sweep", "--input", data, "--m3", "2..1", "--output-dir", ws.out()});
  CHECK(r.code == 2);
  CHECK(r.err.find("\"error\"") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(ws.out() + "/aic_table.csv"));

  CHECK(testcli::run_cli({"decomp", "--input", data, "--m4", "0..2"}).code == 2);
  CHECK(testcli::run_cli({"sweep", "--input", data, "--m1", "2"}).code == 2);
  CHECK(testcli::run_cli({"frobnicate", "--input", data}).code == 2);
  CHECK(testcli::run_cli({"decomp"}).code == 2);
  CHECK(testcli::run_cli({"twostep", "--input", data, "--k", "1"}).code == 2);
  CHECK(testcli::run_cli({"decomp", "--input", data, "--trig-dynamics", "wobbly"}).code == 2);
}

TEST_CASE("runtime failures exit with code 1") {
  testcli::Workspace ws("runtime");
  const auto r = testcli::run_cli({"decomp", "--input", ws.path("missing.csv"), "--m1", "1", "--output-dir", ws.out()});
  CHECK(r.code == 1);
  CHECK(r.err.find("cannot read") != std::string::npos);
  CHECK(fs::is_empty(ws.out()));
}

TEST_CASE("output set rollback removes partial files") {
  testcli::Workspace ws("rollback");
  OutputSet out(ws.out());
  out.write("a.csv", "x\n");
  CHECK(fs::exists(ws.out() + "/a.csv"));
  out.rollback();
  CHECK_FALSE(fs::exists(ws.out() + "/a.csv"));
}

TEST_CASE("decomp with trend, seasonal and AR") {
  testcli::Workspace ws("decomp");
  const auto data = ws.write_monthly("d.csv", 96, 2, {40});
  const auto r = testcli::run_cli({"decomp", "--input", data, "--column", "value", "--m1", "2", "--m2", "1",
                                   "--period", "12", "--m3", "2", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/components.csv");
  CHECK(csv.header == std::vector<std::string>{"n", "y", "observed", "trend", "seasonal", "ar", "noise"});
  CHECK(testcli::max_identity_error(csv) < 1e-8);
  CHECK(csv.cell(40, "observed") == "0");
  CHECK(csv.cell(40, "noise").empty());
  std::ifstream fit(ws.out() + "/fit.json");
  const auto j = nlohmann::json::parse(fit);
  CHECK(j["n_params"] == 6);
  CHECK(j["aic"].get<double>() == doctest::Approx(-2 * j["log_likelihood"].get<double>() + 12));
  CHECK(j["params"].contains("a_2"));
}

TEST_CASE("decomp with only the observation noise") {
  testcli::Workspace ws("noise_only");
  const auto data = ws.write_monthly("d.csv", 30, 3);
  REQUIRE(testcli::run_cli({"decomp", "--input", data, "--column", "value", "--output-dir", ws.out()}).code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/components.csv");
  CHECK(csv.header == std::vector<std::string>{"n", "y", "observed", "noise"});
  for (std::size_t i = 0; i < csv.rows.size(); ++i) CHECK(csv.cell(i, "noise") == csv.cell(i, "y"));
}

TEST_CASE("dual-period decomposition writes both blocks and their sum") {
  testcli::Workspace ws("dual");
  const auto data = ws.write_hourly("h.csv", 336, 4);
  const auto r = testcli::run_cli({"decomp", "--input", data, "--column", "value", "--m1", "1", "--trig-period",
                                   "24", "--m4", "23", "--period2", "168", "--m5", "16", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/components.csv");
  CHECK(csv.header ==
        std::vector<std::string>{"n", "y", "observed", "trend", "trig_1", "trig_2", "trig_sum", "noise"});
  for (std::size_t i = 0; i < csv.rows.size(); ++i)
    CHECK(csv.num(i, "trig_sum") == doctest::Approx(csv.num(i, "trig_1") + csv.num(i, "trig_2")).epsilon(1e-12));
  CHECK(testcli::max_identity_error(csv) < 1e-8);
}

TEST_CASE("sweep table") {
  testcli::Workspace ws("sweep");
  const auto data = ws.write_monthly("d.csv", 72, 5);
  const auto r = testcli::run_cli({"sweep", "--input", data, "--column", "value", "--m1", "2", "--m3", "0,1",
                                   "--m4", "0..3", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/aic_table.csv");
  CHECK(csv.rows.size() == 8);
  CHECK(csv.header == std::vector<std::string>{"m1", "m2", "m3", "m4", "n_params", "log_likelihood", "aic",
                                               "converged", "min", "error"});
  int flagged = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) best = std::min(best, csv.num(i, "aic"));
  for (std::size_t i = 0; i < csv.rows.size(); ++i)
    if (csv.cell(i, "min") == "1") {
      ++flagged;
      CHECK(csv.num(i, "aic") == best);
    }
  CHECK(flagged == 1);
  CHECK(fs::exists(ws.out() + "/aic_table.txt"));
}

TEST_CASE("sweep output does not depend on the thread count") {
  testcli::Workspace ws("threads");
  const auto data = ws.write_monthly("d.csv", 60, 6);
  const std::vector<std::string> args{"sweep", "--input", data, "--column", "value", "--m1", "1", "--m4", "0..3"};
  auto a = args, b = args;
  a.insert(a.end(), {"--output-dir", ws.path("one")});
  b.insert(b.end(), {"--output-dir", ws.path("three")});
  ::setenv("SEASTATE_THREADS", "1", 1);
  REQUIRE(testcli::run_cli(a).code == 0);
  ::setenv("SEASTATE_THREADS", "3", 1);
  REQUIRE(testcli::run_cli(b).code == 0);
  ::unsetenv("SEASTATE_THREADS");
  CHECK(testcli::slurp(ws.path("one/aic_table.csv")) == testcli::slurp(ws.path("three/aic_table.csv")));
}

TEST_CASE("reruns are byte-identical") {
  testcli::Workspace ws("rerun");
  const auto data = ws.write_monthly("d.csv", 60, 7);
  for (const char* dir : {"a", "b"})
    REQUIRE(testcli::run_cli({"decomp", "--input", data, "--column", "value", "--m1", "2", "--m4", "3",
                              "--output-dir", ws.path(dir)})
                .code == 0);
  CHECK(testcli::slurp(ws.path("a/components.csv")) == testcli::slurp(ws.path("b/components.csv")));
  CHECK(testcli::slurp(ws.path("a/fit.json")) == testcli::slurp(ws.path("b/fit.json")));
}

TEST_CASE("twostep writes both stages and AIC prime") {
  testcli::Workspace ws("twostep");
  const auto data = ws.write_monthly("d.csv", 120, 8);
  const auto r = testcli::run_cli({"twostep", "--input", data, "--column", "value", "--k", "2", "--long-period",
                                   "60", "--m1", "1", "--m4", "2", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  std::ifstream fit(ws.out() + "/fit.json");
  const auto j = nlohmann::json::parse(fit);
  CHECK(j["aic_prime"].get<double>() == j["aic"].get<double>() + 10.0);
  const auto reg = testcli::read_csv(ws.out() + "/regression.csv");
  for (std::size_t i = 0; i < reg.rows.size(); ++i)
    CHECK(reg.num(i, "residual") == reg.num(i, "y") - reg.num(i, "curve"));
  const auto comp = testcli::read_csv(ws.out() + "/components.csv");
  CHECK(testcli::max_identity_error(comp) < 1e-8);
}

TEST_CASE("twostep table adds the regression penalty on every row") {
  testcli::Workspace ws("twostep_table");
  const auto data = ws.write_monthly("d.csv", 120, 9);
  const auto r = testcli::run_cli({"twostep", "--input", data, "--column", "value", "--k", "1..2", "--long-period",
                                   "60", "--m1", "1", "--m4", "0,2", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/aic_table.csv");
  CHECK(csv.rows.size() == 4);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const double k = csv.num(i, "k");
    CHECK(csv.num(i, "aic_prime") == csv.num(i, "aic") + 2 * (2 * k + 1));
  }
}

TEST_CASE("twostep with a constant-only first stage centers the series") {
  testcli::Workspace ws("twostep_center");
  // Period-12 content only; a long period of 120 over 240 points sees none of it.
  std::vector<double> y(240);
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = 7.0 + std::cos(2 * std::numbers::pi * static_cast<double>(i + 1) / 12.0) + 0.1 * std::sin(0.37 * i * i);
  const auto data = ws.write_values("c.csv", y);
  const auto r = testcli::run_cli({"twostep", "--input", data, "--column", "value", "--k", "1", "--long-period",
                                   "240", "--m1", "1", "--m4", "2", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto reg = testcli::read_csv(ws.out() + "/regression.csv");
  std::ifstream fit(ws.out() + "/fit.json");
  const auto j = nlohmann::json::parse(fit);
  const double intercept = j["regression"]["intercept"].get<double>();
  double mean = 0.0;
  for (double v : y) mean += v / y.size();
  CHECK(intercept == doctest::Approx(mean).epsilon(1e-12));
  const double c1 = j["regression"]["cos"][0].get<double>();
  const double s1 = j["regression"]["sin"][0].get<double>();
  CHECK(std::abs(c1) < 0.02);
  CHECK(std::abs(s1) < 0.02);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(reg.num(i, "residual") == doctest::Approx(y[i] - reg.num(i, "curve")).epsilon(1e-14));
}

TEST_CASE("predict") {
  testcli::Workspace ws("predict");
  SUBCASE("random-walk trend: flat mean, linear variance") {
    const auto data = ws.write_monthly("d.csv", 60, 10);
    REQUIRE(testcli::run_cli({"predict", "--input", data, "--column", "value", "--m1", "1", "--horizon", "5",
                              "--output-dir", ws.out()})
                .code == 0);
    const auto fc = testcli::read_csv(ws.out() + "/forecast.csv");
    CHECK(fc.header == std::vector<std::string>{"step", "n", "mean", "variance"});
    REQUIRE(fc.rows.size() == 5);
    CHECK(fc.cell(0, "n") == "61");
    const double step = fc.num(1, "variance") - fc.num(0, "variance");
    for (std::size_t h = 0; h < 5; ++h) {
      CHECK(fc.num(h, "mean") == fc.num(0, "mean"));
      CHECK(fc.num(h, "variance") - fc.num(0, "variance") == doctest::Approx(h * step).epsilon(1e-9));
    }
  }
  SUBCASE("horizon 1 matches the filter") {
    const auto data = ws.write_monthly("d.csv", 60, 11);
    REQUIRE(testcli::run_cli({"predict", "--input", data, "--column", "value", "--m1", "2", "--m4", "2", "--horizon",
                              "1", "--output-dir", ws.out()})
                .code == 0);
    RunConfig c;
    c.input = data;
    c.column = "value";
    const auto ts = load_series(c);
    std::ifstream fit(ws.out() + "/fit.json");
    const auto j = nlohmann::json::parse(fit);
    ModelSpec spec;
    spec.trend_order = 2;
    spec.trig.push_back({12.0, 2, TrigDynamics::kRandomWalk, {}, false, false});
    std::vector<ParameterValue> params;
    for (auto& [k, v] : j["params"].items()) params.push_back({k, v.get<double>()});
    const auto model = build_model(spec, params, j["prior_variance"].get<double>(), 61);
    // Appending a 61st point and filtering gives the same one-step moments.
    auto values = ts.observed_values();
    values.push_back(0.0);
    const auto f = kalman_filter(model.model, TimeSeries(values));
    const auto fc = testcli::read_csv(ws.out() + "/forecast.csv");
    CHECK(fc.num(0, "mean") == doctest::Approx(model.model.row(61).dot(f.predicted_mean[60])).epsilon(1e-12));
    CHECK(fc.num(0, "variance") == doctest::Approx(f.innovation_variance[60]).epsilon(1e-12));
  }
  SUBCASE("seasonal forecast follows the zero-sum recursion") {
    std::vector<double> pattern{3, 1, -2, -4, -1, 0, 2, 5, 1, -3, -1, -1};
    std::vector<double> y(96);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 0.05);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 20.0 + pattern[i % 12] + g(rng);
    const auto data = ws.write_values("s.csv", y);
    REQUIRE(testcli::run_cli({"predict", "--input", data, "--column", "value", "--m1", "1", "--m2", "1",
                              "--horizon", "12", "--output-dir", ws.path("p")})
                .code == 0);
    REQUIRE(testcli::run_cli({"decomp", "--input", data, "--column", "value", "--m1", "1", "--m2", "1",
                              "--output-dir", ws.path("d")})
                .code == 0);
    const auto fc = testcli::read_csv(ws.path("p/forecast.csv"));
    const auto comp = testcli::read_csv(ws.path("d/components.csv"));
    // The last smoothed state equals the last filtered state, so the forecast
    // is the final level plus S_{n} = -(S_{n-1} + ... + S_{n-11}) run forward.
    const double level = comp.num(95, "trend");
    std::vector<double> s;
    for (std::size_t i = 85; i < 96; ++i) s.push_back(comp.num(i, "seasonal"));
    for (std::size_t h = 0; h < 12; ++h) {
      double next = 0.0;
      for (std::size_t i = s.size() - 11; i < s.size(); ++i) next -= s[i];
      s.push_back(next);
      CHECK(std::abs(fc.num(h, "mean") - (level + next)) < 1e-6);
      CHECK(std::abs(next - pattern[(96 + h) % 12]) < 0.1);
    }
  }
}

TEST_CASE("subset command mirrors the regression table") {
  testcli::Workspace ws("subset");
  const auto data = ws.write_monthly("d.csv", 120, 13);
  REQUIRE(testcli::run_cli({"subset", "--input", data, "--column", "value", "--trig-period", "12", "--max-order",
                            "6", "--output-dir", ws.out()})
              .code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/subset.csv");
  CHECK(csv.header == std::vector<std::string>{"ORDER", "SIG2", "AIC", "#models", "TERMS"});
  CHECK(csv.rows.size() == 7);
  CHECK(csv.cell(3, "#models") == "20");
}

TEST_CASE("config file with command-line override") {
  testcli::Workspace ws("config_file");
  const auto data = ws.write_monthly("d.csv", 60, 14);
  {
    std::ofstream cfg(ws.path("run.conf"));
    cfg << "input = " << data << "\ncolumn = value\nm1 = 2\nm4 = 0..2\n";
  }
  const auto r = testcli::run_cli({"sweep", "--config", ws.path("run.conf"), "--m4", "1..3", "--output-dir", ws.out()});
  REQUIRE(r.code == 0);
  const auto csv = testcli::read_csv(ws.out() + "/aic_table.csv");
  REQUIRE(csv.rows.size() == 3);
  CHECK(csv.cell(0, "m4") == "1");
  CHECK(csv.cell(0, "m1") == "2");
}

TEST_CASE("installed binary honours the exit-code contract") {
  testcli::Workspace ws("binary");
  const auto data = ws.write_monthly("d.csv", 40, 15);
  const std::string bin = SEASTATE_CLI_PATH;
  auto status = [](const std::string& cmd) { return WEXITSTATUS(std::system((cmd + " >/dev/null 2>&1").c_str())); };
  CHECK(status(bin + " decomp --input " + data + " --column value --m1 1 --output-dir " + ws.out()) == 0);
  CHECK(status(bin + " sweep --input " + data + " --m4 3..1") == 2);
  CHECK(status(bin + " decomp --input " + ws.path("nope.csv") + " --output-dir " + ws.out()) == 1);
  CHECK(status(bin + " --help") == 0);
}
