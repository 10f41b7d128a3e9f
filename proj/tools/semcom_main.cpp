// Command-line front end: run, sweep, validate.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semcom/cli.hpp"

namespace {

using semcom::ConfigError;
using semcom::SimConfig;

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got: " + kv);
    }
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string methods;
  std::string thresholds;
};

SimConfig resolve(const CommonOpts& opts) {
  auto overrides = split_overrides(opts.sets);
  if (opts.seed) {
    overrides.emplace_back("sim.master_seed", std::to_string(*opts.seed));
  }
  if (!opts.methods.empty()) {
    overrides.emplace_back("sim.methods", opts.methods);
  }
  if (!opts.thresholds.empty()) {
    overrides.emplace_back("sim.thresholds", opts.thresholds);
  }
  return semcom::load_config(opts.config_path.empty()
                                 ? std::nullopt
                                 : std::optional<std::string>(opts.config_path),
                             overrides);
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_option("--methods", opts.methods, "comma-separated method list");
  cmd->add_option("--thresholds", opts.thresholds,
                  "comma-separated fidelity thresholds");
  cmd->add_option("--set", opts.sets, "config override, key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-user semantic-communication simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "run the experiment and emit steps/rewards/summary CSVs");
  add_common(run_cmd, run_opts);

  CommonOpts sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "sweep fidelity thresholds and emit overhead.csv");
  add_common(sweep_cmd, sweep_opts);

  std::string checkpoint_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the fast invariant checks");
  validate_cmd->add_option("--checkpoint", checkpoint_path,
                           "existing checkpoint file to validate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? semcom::kExitOk : semcom::kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      return semcom::cmd_run(resolve(run_opts), run_opts.out_dir, std::cout);
    }
    if (sweep_cmd->parsed()) {
      return semcom::cmd_sweep(resolve(sweep_opts), sweep_opts.out_dir,
                               std::cout);
    }
    return semcom::cmd_validate(checkpoint_path, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return semcom::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return semcom::kExitRuntimeError;
  }
}
