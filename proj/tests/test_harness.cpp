#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "binform/cli.hpp"

using namespace binform;

namespace {

std::string config_path(const std::string& name) { return std::string(BINFORM_CONFIG_DIR) + "/" + name + ".json"; }

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / ("binform_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

const char* kMinimal = R"({
  "field": {"minpoly": [0, 1]},
  "forms": [{"name": "p", "F": [1, 0, 1], "G": [0, 0, 0, 0, 1]}],
  "triplet": {"balls": [{"norm": "max", "radius": 1}], "w": [2]}
})";

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
  for (const auto& name : {"rank1_q", "rank0_q", "gaussian_smoke", "two_pairs_q"}) {
    auto c = load_config(config_path(name));
    auto text = serialize_config(c);
    auto again = parse_config(text);
    EXPECT_EQ(again, c) << name;
    EXPECT_EQ(serialize_config(again), text) << name;
    EXPECT_NO_THROW(build_experiment(c)) << name;
  }
}

TEST(Config, DefaultsAndShorthand) {
  auto c = parse_config(kMinimal);
  EXPECT_EQ(c.schedule.grid(), (std::vector<double>{500, 1000, 2000, 4000, 8000}));
  EXPECT_EQ(c.forms[0].F, (std::vector<Coords>{{1}, {0}, {1}}));
  EXPECT_EQ(c.f.builtin, "zero");
  auto e = build_experiment(c);
  EXPECT_EQ(e.S.rank(), 1);
  EXPECT_EQ(e.pair_index("p"), 0);
  EXPECT_EQ(e.pair_index("0"), 0);
  EXPECT_THROW(e.pair_index("q"), Error);
}

TEST(Config, TableSpec) {
  auto j = nlohmann::json::parse(kMinimal);
  j["f"] = {{"table", {{{"p", 5}, {"index", 0}, {"value", "1/2"}}, {{"p", 13}, {"value", 2}}}}};
  auto c = config_from_json(j);
  EXPECT_EQ(c.f.builtin, "table");
  ASSERT_EQ(c.f.table.size(), 2u);
  EXPECT_EQ(c.f.table[1].value, "2");
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  auto e = build_experiment(c);
  EXPECT_EQ(e.f.value(5, 0, 5), rational(1, 2));

  j["f"]["table"][1]["value"] = "-3/2";
  try {
    build_experiment(config_from_json(j));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ConfigInvalid);
  }
}

TEST(Config, Rejections) {
  auto expect_invalid = [](const std::string& text) {
    try {
      build_experiment(parse_config(text));
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid) << e.what();
    }
  };
  auto j = nlohmann::json::parse(kMinimal);
  auto with = [&](auto edit) {
    auto k = j;
    edit(k);
    return k.dump();
  };
  expect_invalid("{not json");
  expect_invalid(with([](auto& k) { k["colour"] = 1; }));
  expect_invalid(with([](auto& k) { k.erase("field"); }));
  expect_invalid(with([](auto& k) { k["f"] = "unknown"; }));
  expect_invalid(with([](auto& k) { k["forms"][0].erase("G"); }));
  expect_invalid(with([](auto& k) { k["forms"][0]["F"] = {{1, 2}, 0, 1}; }));
  expect_invalid(with([](auto& k) { k["schedule"] = {{"ratio", 1}}; }));
  expect_invalid(with([](auto& k) { k["suites"] = {{"plots", true}}; }));
  expect_invalid(with([](auto& k) { k["triplet"]["w"] = nlohmann::json::array(); }));
  expect_invalid(with([](auto& k) { k["forms"].push_back(k["forms"][0]); }));
}

TEST(Fit, SyntheticInjectionIsRecovered) {
  std::vector<double> xs{500, 1000, 2000, 4000, 8000}, ds;
  for (double x : xs) ds.push_back(7 * x * x * std::pow(std::log(x), 3));
  auto g = fit_growth(xs, ds);
  EXPECT_NEAR(g.rho_hat, 3, 1e-6);
  EXPECT_NEAR(g.c_hat, 7, 1e-6);
  for (double r : g.residuals) EXPECT_NEAR(r, 0, 1e-9);
}

TEST(Fit, RefitReproducesStoredGrid) {
  GrowthReport rep;
  for (double x : {100.0, 300.0, 900.0, 2700.0}) rep.grid.push_back({x, Rational(static_cast<long>(x * x * 3 + x * 17)), 0});
  rep.fit = rep.refit();
  auto again = rep.refit();
  EXPECT_EQ(again.rho_hat, rep.fit.rho_hat);
  EXPECT_EQ(again.c_hat, rep.fit.c_hat);
  EXPECT_EQ(again.residuals, rep.fit.residuals);
}

TEST(Fit, ScheduleTooShort) {
  try {
    fit_growth({10, 20, 40}, {1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScheduleTooShort);
  }
  auto e = build_experiment(load_config(config_path("rank1_q")));
  EXPECT_THROW(run_fit(e, {10, 20, 40}), Error);
}

TEST(Fit, ShortRankZeroScheduleIsFlat) {
  auto e = build_experiment(load_config(config_path("rank0_q")));
  auto rep = run_fit(e, {50, 100, 200, 400});
  EXPECT_EQ(rep.declared_rank, 0);
  EXPECT_TRUE(rep.verdict()) << rep.fit.rho_hat;
}

TEST(Sum, MatchesInProcessBruteforce) {
  for (const auto& name : {"rank1_q", "rank0_q", "gaussian_smoke", "two_pairs_q"}) {
    auto e = build_experiment(load_config(config_path(name)));
    auto rows = run_sums(e, {5, 12, 30});
    for (const auto& r : rows) EXPECT_EQ(r.D, divisor_sum_bruteforce(e.S, e.f, e.T, r.X)) << name << " X=" << r.X;
  }
}

TEST(Sum, RunningExampleValue) {
  auto e = build_experiment(load_config(config_path("rank1_q")));
  EXPECT_EQ(run_sums(e, {3})[0].D, 18);
}

TEST(Sum, InadmissibleTripletFails) {
  auto j = nlohmann::json::parse(kMinimal);
  j["forms"][0]["G"] = {0, 0, 2};
  auto e = build_experiment(config_from_json(j));
  try {
    run_sums(e, {10});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::AdmissibilityFailed);
  }
}

TEST(Cli, Rank) {
  auto r = cli({"rank", "--config", config_path("two_pairs_q")});
  EXPECT_EQ(r.code, 0);
  auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "pair,name,deg_F,deg_G,verdict,square_class,provenance");
  EXPECT_EQ(lines[3], "rank,,,,1,,deterministic");
  EXPECT_EQ(lines[4], "complexity,,,,2,,");

  auto empty = temp_file("empty.json", R"({"field": {"minpoly": [0, 1]}, "forms": [],
    "triplet": {"balls": [{"radius": 1}], "w": [2]}})");
  auto e = cli({"rank", "--config", empty});
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("rank,,,,0,,deterministic"), std::string::npos);
  EXPECT_NE(e.out.find("complexity,,,,0,,"), std::string::npos);
}

TEST(Cli, RhoTable) {
  auto r = cli({"rho", "--config", config_path("rank0_q"), "--pair", "squares_2t2", "--prime-bound", "100"});
  EXPECT_EQ(r.code, 0);
  std::map<i64, std::string> by_p;
  for (const auto& line : split_lines(r.out)) by_p[std::atoll(line.c_str())] = line;
  EXPECT_EQ(by_p[5], "5,0,5,0,0,2,0,-2");
  EXPECT_EQ(by_p[13], "13,0,13,0,0,2,0,-2");
  EXPECT_EQ(by_p[17], "17,0,17,0,2,0,0,2");
  EXPECT_EQ(cli({"rho", "--config", config_path("rank0_q"), "--pair", "nope"}).code, 2);
}

TEST(Cli, VerifySuites) {
  EXPECT_EQ(cli({"verify", "--config", config_path("rank1_q"), "--suite", "hyperbola"}).code, 0);
  EXPECT_EQ(cli({"verify", "--config", config_path("rank1_q"), "--suite", "core"}).code, 0);
  auto bad = cli({"verify", "--config", config_path("rank1_q"), "--suite", "plots"});
  EXPECT_EQ(bad.code, 1);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"sum"}).code, 1);
  EXPECT_EQ(cli({"frobnicate", "--config", config_path("rank1_q")}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"sum", "--config", "/nonexistent/config.json"}).code, 2);
  EXPECT_EQ(cli({"fit", "--config", config_path("rank1_q"), "--xmax", "2000"}).code, 2);
  auto bad = temp_file("bad_rank0.json", R"({"field": {"minpoly": [0, 1]},
    "forms": [{"F": [1, 0, 1], "G": [0, 0, 2]}], "triplet": {"balls": [{"norm": "max"}], "w": [2]}})");
  auto r = cli({"sum", "--config", bad, "--xmax", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("AdmissibilityFailed"), std::string::npos);
}

TEST(Cli, OutputsAreReproducible) {
  auto a = cli({"sum", "--config", config_path("gaussian_smoke"), "--xmax", "12", "--no-timing"});
  auto b = cli({"sum", "--config", config_path("gaussian_smoke"), "--xmax", "12", "--no-timing", "--jobs", "3"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(split_lines(a.out)[0], "X,D_exact,D_over_X2,elapsed_ms");

  auto v1 = cli({"verify", "--config", config_path("gaussian_smoke"), "--suite", "volume", "--seed", "11"});
  auto v2 = cli({"verify", "--config", config_path("gaussian_smoke"), "--suite", "volume", "--seed", "11"});
  EXPECT_EQ(v1.code, 0) << v1.err;
  EXPECT_EQ(v1.out, v2.out);
  auto v3 = cli({"verify", "--config", config_path("gaussian_smoke"), "--suite", "volume", "--seed", "12"});
  EXPECT_NE(v1.out, v3.out);

  auto path = (std::filesystem::temp_directory_path() / "binform_test_out.csv").string();
  EXPECT_EQ(cli({"sum", "--config", config_path("gaussian_smoke"), "--xmax", "12", "--no-timing", "--out", path}).code, 0);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), a.out);
}

TEST(Cli, JobsFallsBackToEnvironment) {
  ::unsetenv("BINFORM_JOBS");
  EXPECT_EQ(resolve_jobs(0), 1);
  ::setenv("BINFORM_JOBS", "4", 1);
  EXPECT_EQ(resolve_jobs(0), 4);
  EXPECT_EQ(resolve_jobs(2), 2);
  ::setenv("BINFORM_JOBS", "many", 1);
  EXPECT_EQ(resolve_jobs(0), 1);
  ::unsetenv("BINFORM_JOBS");
}
