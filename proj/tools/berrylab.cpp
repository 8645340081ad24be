// Command-line driver:
//   berrylab [--strict] <subcommand> --config FILE [--seed N] [--out DIR] [--threads N]

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "berrylab/config.hpp"
#include "berrylab/error.hpp"
#include "berrylab/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "experiment config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "override the config seed");
  sub->add_option("--out", args.out, "override the output directory");
  sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

berrylab::ExperimentConfig load(const CommonArgs& args) {
  auto cfg = berrylab::load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.output_dir = *args.out;
  if (args.threads) cfg.threads = *args.threads;
  return cfg;
}

bool g_strict = false;

int report(const berrylab::ExperimentReport& rep) {
  for (const auto& v : rep.verdicts)
    std::printf("%-28s %s  %s\n", v.name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
  for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("wrote %zu artifacts to %s (%.1f s)\n", rep.artifacts.size(),
              rep.config.output_dir.c_str(), rep.wall_seconds);
  return g_strict && !rep.passed() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo checks of large-time limit theorems for one-dimensional diffusions"};
  app.require_subcommand(1);
  app.add_flag("--strict", g_strict, "exit with status 2 when a verdict fails");

  CommonArgs simulate_args, distance_args, rate_args, malliavin_args, bounds_args, run_args;
  std::optional<std::string> sample_path, distances_path;

  auto* simulate = app.add_subcommand("simulate", "simulate and write the scaled statistic per path");
  add_common(simulate, simulate_args);
  auto* distance = app.add_subcommand("distance", "estimate distances to N(0,1) per horizon");
  add_common(distance, distance_args);
  distance->add_option("--sample", sample_path, "estimate the distance of a stored sample instead");
  auto* rate = app.add_subcommand("rate", "fit the convergence rate of the distances");
  add_common(rate, rate_args);
  rate->add_option("--distances", distances_path, "fit from an existing distance CSV");
  auto* malliavin = app.add_subcommand("malliavin", "Malliavin quantities and Stein budget per horizon");
  add_common(malliavin, malliavin_args);
  auto* bounds = app.add_subcommand("bounds", "tail, functional and Gaussian TV checks");
  add_common(bounds, bounds_args);
  auto* run = app.add_subcommand("run", "run the experiment named in the config");
  add_common(run, run_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return report(berrylab::run_simulate(load(simulate_args)));
    if (distance->parsed()) return report(berrylab::run_distance(load(distance_args), sample_path));
    if (rate->parsed()) return report(berrylab::run_rate(load(rate_args), distances_path));
    if (malliavin->parsed()) {
      auto cfg = load(malliavin_args);
      cfg.experiment = berrylab::ExperimentKind::malliavin_regimes;
      return report(berrylab::run_experiment(cfg));
    }
    if (bounds->parsed()) {
      auto cfg = load(bounds_args);
      cfg.experiment = berrylab::ExperimentKind::bounds_suite;
      return report(berrylab::run_experiment(cfg));
    }
    return report(berrylab::run_experiment(load(run_args)));
  } catch (const berrylab::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(berrylab::to_string(e.kind())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
