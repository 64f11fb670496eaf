// Command-line front end: simulate / identify / report / selftest.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 failed checks (report --check, selftest).

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "msid/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single moving sensor bridge modal identification toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, estimator = "sd";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int runs = 0, workers = 0;
  bool check = false;

  auto* sim = app.add_subcommand("simulate", "run the configured ensemble");
  sim->add_option("--config", config_path, "experiment config JSON")->required();
  sim->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  sim->add_option("--runs", runs, "run count override");
  sim->add_option("--workers", workers, "worker threads (0 = all, 1 = serial)");
  sim->add_option("--out", out_dir, "output directory override");

  auto* ident = app.add_subcommand("identify", "estimate modes from a run directory");
  ident->add_option("--out", out_dir, "simulation output directory")->required();
  ident->add_option("--estimator", estimator, "nls | sd | eps")->required();
  ident->add_option("--workers", workers, "worker threads");

  auto* rep = app.add_subcommand("report", "bundle tables and curves");
  rep->add_option("--out", out_dir, "simulation output directory")->required();
  rep->add_flag("--check", check, "evaluate the config's acceptance gates");

  auto* self = app.add_subcommand("selftest", "run the property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      msid::ExperimentConfig config;
      try {
        config = msid::ExperimentConfig::from_file(config_path);
        if (seed_given) config.master_seed = seed;
        if (runs > 0) config.runs = runs;
        if (!out_dir.empty()) config.out_dir = out_dir;
        config.validate();
      } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
      }
      const auto manifest =
          msid::run_simulate(config, config.out_dir, workers == 0 ? 0 : workers);
      std::cout << "simulated " << manifest.run_seeds.size() << " runs into "
                << config.out_dir << " (config " << manifest.config_hash << ")\n";
      if (!manifest.all_ok) {
        std::cerr << "some runs failed; see the manifest\n";
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (ident->parsed()) {
      try {
        const auto summary = msid::run_identify(out_dir, estimator, workers);
        std::cout << "identified modes (" << estimator << "):\n";
        for (std::size_t n = 0; n < summary.omega.size(); ++n) {
          std::cout << "  mode " << n + 1 << ": omega " << summary.omega[n]
                    << " rad/s, zeta " << summary.zeta[n]
                    << (summary.excited[n] ? "" : "  [unexcited]") << '\n';
        }
        return kExitOk;
      } catch (const std::invalid_argument& err) {
        std::cerr << "identify refused: " << err.what() << '\n';
        return kExitConfig;
      }
    }

    if (rep->parsed()) {
      const auto outcome = msid::run_report(out_dir, check);
      if (check) {
        for (const auto& co : outcome.checks)
          std::cout << (co.passed ? "[PASS] " : "[FAIL] ") << co.description
                    << "  value " << co.value << '\n';
        if (!outcome.all_passed) return kExitCheck;
      } else {
        std::cout << "report written under " << out_dir << "/report\n";
      }
      return kExitOk;
    }

    if (self->parsed()) {
      const int failures = msid::selftest(std::cout);
      return failures == 0 ? kExitOk : kExitCheck;
    }
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
