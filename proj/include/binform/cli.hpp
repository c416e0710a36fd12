#pragma once

// Command line front end: binform sum|fit|verify|rank|rho.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "binform/harness.hpp"

namespace binform {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitVerify = 3 };

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ScheduleTooShort:
    case ErrorCode::AdmissibilityFailed:
    case ErrorCode::StrongAdmissibilityFailed:
    case ErrorCode::ConditionViolated:
    case ErrorCode::NonMonic:
    case ErrorCode::ZeroDiscriminant:
    case ErrorCode::RationalRootFound:
    case ErrorCode::DegreeTooLarge:
    case ErrorCode::DegreeParity:
    case ErrorCode::ResultantZero:
    case ErrorCode::ZeroIdeal:
    case ErrorCode::PreconditionFailed:
      return kExitConfig;
    default:
      return kExitVerify;
  }
}

// Worker count from --jobs, then BINFORM_JOBS, then 1.
inline int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("BINFORM_JOBS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

// args excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"binform: divisor sums over values of binary forms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "binform 1.0 (csv v" + std::to_string(kCsvVersion) + ")");

  std::string config_path, out_path, suite = "all", pair;
  double xmax = 0;
  std::uint64_t seed = 0;
  bool have_seed = false, verdict = false, no_timing = false;
  int jobs = 0;
  i64 prime_bound = 100;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_path, "write CSV here instead of stdout");
    sub->add_option("--jobs", jobs, "worker threads (default: BINFORM_JOBS or 1)");
    sub->add_option("--seed", seed, "Monte Carlo seed")->each([&](const std::string&) { have_seed = true; });
  };
  auto* sum = app.add_subcommand("sum", "D(X) at one X as an exact rational");
  common(sum);
  sum->add_option("--xmax", xmax, "X (default: the last schedule point)");
  sum->add_flag("--no-timing", no_timing, "write 0 in the elapsed_ms column");
  auto* fit = app.add_subcommand("fit", "run the X schedule and fit D(X) ~ c X^2 (log X)^rho");
  common(fit);
  fit->add_option("--xmax", xmax, "drop schedule points above this X");
  fit->add_flag("--verdict", verdict, "exit 3 unless |rho_hat - rank| <= 0.3");
  auto* verify = app.add_subcommand("verify", "run report-valued checks");
  common(verify);
  verify->add_option("--suite", suite, "core|hyperbola|lattice|lfunc|volume|all");
  auto* rank = app.add_subcommand("rank", "square-class verdicts, rank and complexity");
  common(rank);
  auto* rho = app.add_subcommand("rho", "rho(P) for one pair over prime ideals of bounded norm");
  common(rho);
  rho->add_option("--pair", pair, "pair name or index")->required();
  rho->add_option("--prime-bound", prime_bound, "largest prime norm")->check(CLI::Range(2, 100000000));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (verify->parsed() && !known_suite(suite)) {
    err << "unknown suite '" << suite << "'\n";
    return kExitUsage;
  }

  const int workers = resolve_jobs(jobs);
  try {
    Experiment e = build_experiment(load_config(config_path));
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) {
        err << "cannot write " << out_path << "\n";
        return kExitUsage;
      }
    }
    std::ostream& csv = out_path.empty() ? out : file;

    if (sum->parsed()) {
      const double X = xmax > 0 ? xmax : e.config.schedule.grid().back();
      write_sum_csv(csv, run_sums(e, {X}, workers), !no_timing);
      return kExitOk;
    }
    if (fit->parsed()) {
      auto xs = e.config.schedule.grid();
      if (xmax > 0) std::erase_if(xs, [&](double x) { return x > xmax; });
      auto rep = run_fit(e, xs, workers);
      write_fit_csv(csv, rep);
      err << "rho_hat = " << rep.fit.rho_hat << ", c_hat = " << rep.fit.c_hat << ", rank = " << rep.declared_rank
          << (rep.probabilistic_rank ? " (probabilistic)" : "") << "\n";
      if (verdict && !rep.verdict()) {
        err << "FAIL: |rho_hat - rank| = " << rep.deviation() << " > " << kGrowthTolerance << "\n";
        return kExitVerify;
      }
      return kExitOk;
    }
    if (verify->parsed()) {
      VerifyOptions opt;
      opt.jobs = workers;
      opt.seed = have_seed ? seed : e.config.seed;
      opt.mc_samples = e.config.mc_samples;
      auto rows = run_suite(e, suite, opt);
      write_check_csv(csv, rows);
      int failed = 0;
      for (const auto& r : rows) {
        err << (r.passed ? "PASS " : "FAIL ") << r.suite << "/" << r.check << ": " << r.detail << "\n";
        failed += !r.passed;
      }
      err << rows.size() - failed << " of " << rows.size() << " checks passed\n";
      return failed ? kExitVerify : kExitOk;
    }
    if (rank->parsed()) {
      write_rank_csv(csv, e.S);
      return kExitOk;
    }
    if (rho->parsed()) {
      const int i = e.pair_index(pair);
      const auto& pr = e.S.pair(i);
      write_rho_csv(csv, rho_table(e.K, pr.F, pr.G, e.T.w_factorization(), prime_bound, workers));
      return kExitOk;
    }
  } catch (const Error& ex) {
    err << ex.what() << "\n";
    return exit_code_for(ex.code());
  }
  return kExitUsage;
}

}  // namespace binform
