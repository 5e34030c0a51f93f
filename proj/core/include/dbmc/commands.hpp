#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dbmc/concentration_matrix.hpp"
#include "dbmc/config.hpp"
#include "dbmc/csv.hpp"
#include "dbmc/network.hpp"

namespace dbmc {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNotConverged = 2,
  kExitNumeric = 3,
};

// Geometry, horizon and matrices resolved from a config.
struct Experiment {
  ExperimentConfig config;
  NetworkGeometry geometry;
  double horizon = 0.0;
  ConcentrationMatrix concentration;  // after optional sparsification
  IterationMatrix iteration;
  std::optional<EffectiveRadiusReport> radius;  // when matrix.epsilon is set
  std::optional<int> formula_neighbor_count;    // pi R^2 d, when density is set
  std::vector<std::string> warnings;
};

Experiment prepare_experiment(const ExperimentConfig& config);

// "# key: value" block shared by every output file.
csv::Metadata base_metadata(const Experiment& experiment);

// Each command writes its files into config.output.directory (created if
// needed) and returns an exit code.
int cmd_build_matrix(const ExperimentConfig& config, std::ostream& log);
int cmd_spectrum(const ExperimentConfig& config, std::ostream& log);
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);

struct SweepSpec {
  std::string parameter;  // N, N_prime, epsilon, a, or section.key
  std::vector<std::string> values;
  std::string command;    // optional per-value subcommand, "" for summary only
};

// Maps the short sweep names onto config keys.
std::string sweep_key(const std::string& parameter);

// Re-parses `document` with `overrides` plus "<key>=<value>" for every sweep
// value and writes sweep.csv (one summary row per value) into the base
// output directory; with a command set, that command's files go to
// <output>/<parameter>=<value>/.
int cmd_sweep(std::string_view document, const std::vector<std::string>& overrides,
              const SweepSpec& sweep, std::ostream& log);

}  // namespace dbmc
