// amvlab: run, validate and list experiment configurations.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "amv/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"amvlab: asymptotic mean value experiments"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 0;

  auto* run = app.add_subcommand("run", "Run an experiment and write report.txt plus CSV tables");
  run->add_option("config", config, "Experiment config file")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Output directory (default amvlab_out/<kind>)");
  run->add_option("--workers", workers, "Worker threads (default: AMVLAB_WORKERS or 1)")->check(CLI::Range(1u, 1024u));

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config, "Experiment config file")->required();

  auto* list = app.add_subcommand("list-catalogs", "Print experiment kinds and descriptor catalogs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : amv::kExitConfigError;
  }

  if (*list) {
    for (const auto& line : amv::catalog_listing()) std::cout << line << '\n';
    return 0;
  }

  if (*validate) {
    try {
      const auto cfg = amv::ExperimentConfig::load(config);
      const auto issues = amv::validate(cfg);
      for (const auto& i : issues) std::cout << i.str() << '\n';
      if (!amv::runnable(issues)) return amv::kExitConfigError;
      std::cout << "ok: " << config << " (" << amv::to_string(cfg.kind()) << ")\n";
      return 0;
    } catch (const amv::ConfigError& e) {
      std::cout << "issue: " << e.what() << '\n';
      return amv::kExitConfigError;
    }
  }

  amv::RunOptions opt;
  opt.out_dir = out;
  opt.seed = seed;
  opt.workers = workers;
  const auto result = amv::run_file(config, opt);
  for (const auto& i : result.issues) {
    if (i.warning) std::cerr << i.str() << '\n';
  }
  if (result.exit_code == amv::kExitConfigError || result.exit_code == amv::kExitNumericalFailure) {
    std::cerr << "error: " << result.message << '\n';
    return result.exit_code;
  }
  for (const auto& a : result.assertions) std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
  std::cout << "report: " << result.out_dir << "/report.txt\n";
  return result.exit_code;
}
