// dbmc: consensus over diffusion-based molecular channels.
//
//   dbmc build-matrix --config cfg.json [--set section.key=value]... [--out DIR] [--seed S]
//   dbmc spectrum     --config cfg.json ...
//   dbmc simulate     --config cfg.json ...
//   dbmc sweep        --config cfg.json --param N --values 10,20,40 [--command spectrum]
//
// Exit status: 0 success/converged, 1 usage or config error, 2 simulation
// did not converge, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dbmc/commands.hpp"
#include "dbmc/config.hpp"
#include "dbmc/errors.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON experiment config")->required();
  cmd->add_option("--set", args.sets, "Override, section.key=value (repeatable)");
  cmd->add_option("--out", args.out, "Output directory (output.directory)");
  cmd->add_option("--seed", args.seed, "Seed (statistics.seed)")->check(CLI::NonNegativeNumber);
}

std::vector<std::string> collect_overrides(const CommonArgs& args) {
  std::vector<std::string> overrides = args.sets;
  if (!args.out.empty()) overrides.push_back("output.directory=\"" + args.out + "\"");
  if (args.seed >= 0) overrides.push_back("statistics.seed=" + std::to_string(args.seed));
  return overrides;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dbmc::ValidationError("--config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(item);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average consensus over diffusion-based molecular communication"};
  app.require_subcommand(1);

  CommonArgs build_args, spectrum_args, simulate_args, sweep_args;
  auto* build = app.add_subcommand("build-matrix", "Write X, X~ and diagnostics");
  add_common(build, build_args);
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, lambda2, column-variance series");
  add_common(spectrum, spectrum_args);
  auto* simulate = app.add_subcommand("simulate", "Deterministic trajectory and Monte Carlo ensemble");
  add_common(simulate, simulate_args);
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over parameter values");
  add_common(sweep, sweep_args);
  dbmc::SweepSpec sweep_spec;
  std::string sweep_values;
  sweep->add_option("--param", sweep_spec.parameter, "N, N_prime, epsilon, a or section.key")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--command", sweep_spec.command, "Also run this subcommand per value")
      ->check(CLI::IsMember({"build-matrix", "spectrum", "simulate"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? dbmc::kExitOk : dbmc::kExitUsage;
  }

  try {
    if (build->parsed()) {
      return dbmc::cmd_build_matrix(
          dbmc::load_config_file(build_args.config, collect_overrides(build_args)), std::cerr);
    }
    if (spectrum->parsed()) {
      return dbmc::cmd_spectrum(
          dbmc::load_config_file(spectrum_args.config, collect_overrides(spectrum_args)),
          std::cerr);
    }
    if (simulate->parsed()) {
      return dbmc::cmd_simulate(
          dbmc::load_config_file(simulate_args.config, collect_overrides(simulate_args)),
          std::cerr);
    }
    sweep_spec.values = split_values(sweep_values);
    return dbmc::cmd_sweep(read_file(sweep_args.config), collect_overrides(sweep_args),
                           sweep_spec, std::cerr);
  } catch (const dbmc::ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return dbmc::kExitNumeric;
  } catch (const dbmc::DivergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return dbmc::kExitNumeric;
  } catch (const dbmc::DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return dbmc::kExitNumeric;
  } catch (const std::invalid_argument& e) {
    // ValidationError, ModeError, DegenerateRadiusError
    std::cerr << "error: " << e.what() << '\n';
    return dbmc::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dbmc::kExitUsage;
  }
}
