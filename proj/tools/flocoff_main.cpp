// flocoff: run offloading + federated-training scenarios from JSON configs.
//
//   flocoff simulate --config configs/desk.json --policy iojr --out runs/iojr
//   flocoff sweep --configs "configs/gamma_*.json" --jobs 4
//   flocoff audit --config configs/desk.json

#include <glob.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flocoff/harness.hpp"

namespace {

using flocoff::Error;
using flocoff::ErrorKind;
using flocoff::ErrorRecord;
using flocoff::ResultsBundle;
using flocoff::ScenarioConfig;

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw Error(ErrorKind::kIo, "glob failed for " + pattern);
  return out;
}

int report(const ResultsBundle& bundle, const std::filesystem::path& dir) {
  if (!bundle.ok()) {
    std::cout << flocoff::error_json(*bundle.error);
    return 1;
  }
  flocoff::emit(bundle, dir);
  std::cout << flocoff::summary_json(bundle);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge federated-learning offloading simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::int64_t> gamma;
  std::optional<std::size_t> rounds;
  std::optional<std::string> out_dir;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its results");
  simulate->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override the run seed");
  simulate->add_option("--policy", policy, "Offloading policy")
      ->check(CLI::IsMember({"mklco", "iojr", "random"}));
  simulate->add_option("--gamma", gamma, "Data volume threshold (samples)");
  simulate->add_option("--rounds", rounds, "Federated training rounds");
  simulate->add_option("--out", out_dir, "Output directory");

  std::string configs_glob;
  std::size_t jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run every config matching a glob");
  sweep->add_option("--configs", configs_glob, "Glob of scenario JSON files")->required();
  sweep->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

  auto* audit = app.add_subcommand("audit", "Paired Non-IID/IID training and the divergence-bound audit");
  audit->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate || *audit) {
      ScenarioConfig cfg = flocoff::load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (policy) cfg.scheduler.policy = flocoff::parse_policy(*policy);
      if (gamma) cfg.scheduler.gamma = *gamma;
      if (rounds) cfg.train.rounds = *rounds;
      if (out_dir) cfg.output_dir = *out_dir;
      cfg.validate();
      const auto bundle = *simulate ? flocoff::run_scenario(cfg) : flocoff::run_audit(cfg);
      return report(bundle, flocoff::resolve_output_dir(cfg));
    }

    const auto paths = expand_glob(configs_glob);
    std::vector<ScenarioConfig> cfgs;
    for (const auto& p : paths) cfgs.push_back(flocoff::load_config(p));
    const auto bundles = flocoff::sweep(cfgs, jobs);
    int status = 0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto dir = flocoff::resolve_output_dir(cfgs[i]) /
                       std::filesystem::path(paths[i]).stem();
      status |= report(bundles[i], dir);
    }
    return status;
  } catch (const Error& e) {
    std::cout << flocoff::error_json(ErrorRecord{std::string(flocoff::to_string(e.kind())), e.what()});
    return 2;
  }
}
