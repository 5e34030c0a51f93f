#include "dbmc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dbmc/consensus_sim.hpp"
#include "dbmc/errors.hpp"
#include "dbmc/spectral.hpp"

#ifndef DBMC_VERSION
#define DBMC_VERSION "0.0.0"
#endif

namespace dbmc {
namespace fs = std::filesystem;

namespace {

NetworkGeometry make_geometry(const ExperimentConfig& c) {
  const GeometrySpec& g = c.geometry;
  switch (g.kind) {
    case GeometryKind::line:
      return line_network(*g.nodes, *g.spacing, *c.medium);
    case GeometryKind::wrapped_line:
      return wrapped_line_network(*g.nodes, *g.spacing, *c.medium);
    case GeometryKind::grid:
      return grid_network(*g.rows, *g.cols, *g.spacing, *c.medium);
    case GeometryKind::cluster:
      return compact_cluster(*g.nodes, *g.cluster_radius, *c.medium, *c.statistics.seed);
    case GeometryKind::custom: {
      std::ifstream in(*g.file);
      if (!in) throw ValidationError("geometry.file", "cannot open '" + *g.file + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      NetworkGeometry loaded = load_geometry(buf.str());
      if (!c.medium) return loaded;
      return NetworkGeometry(loaded.positions(), *c.medium, loaded.spacing(), loaded.period());
    }
  }
  throw ValidationError("geometry.kind", "unsupported kind");
}

double resolve_horizon(const ExperimentConfig& c, const NetworkGeometry& geometry) {
  if (c.schedule.horizon) return *c.schedule.horizon;
  const std::optional<double> radius = c.schedule.radius ? c.schedule.radius : geometry.spacing();
  if (!radius) {
    throw ValidationError("schedule.T0",
                          "set schedule.T0 or schedule.R (no spacing to derive R from)");
  }
  return epoch_schedule(*radius, geometry.medium().diffusion_coefficient, c.schedule.k).horizon;
}

bool wants(const ExperimentConfig& c, const std::string& file) {
  const auto& f = c.output.files;
  return f.empty() || std::find(f.begin(), f.end(), file) != f.end();
}

fs::path output_dir(const ExperimentConfig& c) {
  fs::path dir(c.output.directory);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("output.directory", "cannot write '" + path.string() + "'");
  return out;
}

bool is_symmetric(const Matrix& m) { return m.max_asymmetry() <= 1e-9; }

// |lambda2| by the full decomposition when possible, else by power iteration.
double abs_lambda2(const Matrix& m) {
  if (m.rows() < 2) return 0.0;
  if (is_symmetric(m)) return std::abs(eigendecompose_symmetric(m).lambda2);
  return lambda2_power(m).value;
}

void report_warnings(const Experiment& e, std::ostream& log) {
  for (const auto& w : e.warnings) log << "warning: " << w << '\n';
}

}  // namespace

Experiment prepare_experiment(const ExperimentConfig& config) {
  NetworkGeometry geometry = make_geometry(config);
  const double horizon = resolve_horizon(config, geometry);
  ConcentrationMatrix x = build_concentration_matrix(geometry, horizon);

  Experiment e{config, geometry, horizon, x, {}, std::nullopt, std::nullopt, {}};
  if (config.geometry.kind == GeometryKind::cluster &&
      !cluster_is_compact(*config.geometry.cluster_radius, geometry.medium(), horizon)) {
    e.warnings.push_back("cluster_radius is not small against sqrt(4 D T0); the one-shot "
                         "consensus assumption is weak");
  }

  std::optional<int> budget = config.matrix.neighbor_budget;
  if (config.matrix.epsilon) {
    e.radius = effective_radius(geometry, horizon, *config.matrix.epsilon);
    if (!budget) {
      budget = std::min(e.radius->neighbor_count, static_cast<int>(geometry.size()) - 1);
    }
    if (config.matrix.density && geometry.medium().dimension == 2) {
      e.formula_neighbor_count = static_cast<int>(
          std::lround(std::numbers::pi * e.radius->radius * e.radius->radius * *config.matrix.density));
    }
  }
  if (budget) {
    if (*budget > static_cast<int>(geometry.size()) - 1) {
      throw ValidationError("matrix.N_prime", "N' must lie in [0, N - 1] (N = " +
                                                  std::to_string(geometry.size()) + ")");
    }
    e.concentration = sparsify(x, distance_matrix(geometry), *budget);
  }
  e.iteration = normalize(e.concentration, config.matrix.normalization);
  return e;
}

csv::Metadata base_metadata(const Experiment& e) {
  std::string defaults;
  for (const auto& d : e.config.applied_defaults) {
    if (!defaults.empty()) defaults += "; ";
    defaults += d;
  }
  csv::Metadata meta{
      {"tool", std::string("dbmc ") + DBMC_VERSION},
      {"config_hash", "fnv1a64:" + e.config.hash},
      {"defaults", defaults.empty() ? "none" : defaults},
      {"normalization", std::string(to_string(e.iteration.mode))},
      {"geometry", std::string(to_string(e.config.geometry.kind))},
      {"nodes", std::to_string(e.geometry.size())},
      {"T0", csv::format(e.horizon)},
  };
  if (e.concentration.neighbor_budget) {
    meta.emplace_back("N_prime", std::to_string(*e.concentration.neighbor_budget));
  }
  if (e.radius) {
    meta.emplace_back("effective_radius", csv::format(e.radius->radius));
    meta.emplace_back("epsilon", csv::format(e.radius->epsilon));
  }
  if (e.formula_neighbor_count) {
    meta.emplace_back("N_prime_density_formula", std::to_string(*e.formula_neighbor_count));
  }
  return meta;
}

int cmd_build_matrix(const ExperimentConfig& config, std::ostream& log) {
  const Experiment e = prepare_experiment(config);
  report_warnings(e, log);
  const fs::path dir = output_dir(config);
  const csv::Metadata meta = base_metadata(e);

  if (wants(config, "X.csv")) {
    auto out = open_output(dir / "X.csv");
    csv::write_matrix(out, e.concentration.entries, meta);
  }
  if (wants(config, "Xtilde.csv")) {
    auto out = open_output(dir / "Xtilde.csv");
    csv::write_matrix(out, e.iteration.entries, meta);
  }
  if (wants(config, "diagnostics.csv")) {
    auto out = open_output(dir / "diagnostics.csv");
    csv::Metadata diag = meta;
    const MarkovStructure structure = markov_structure_check(e.iteration.entries);
    diag.emplace_back("doubly_stochastic", csv::format(e.iteration.doubly_stochastic));
    diag.emplace_back("aperiodic", csv::format(structure.aperiodic));
    diag.emplace_back("irreducible", csv::format(structure.irreducible));
    csv::Writer w(out, diag,
                  {"node_id", "x_column_sum", "xtilde_column_sum", "xtilde_row_sum",
                   "neighbor_count", "doubly_stochastic"});
    const Vector x_sums = e.concentration.entries.column_sums();
    const std::vector<int> neighbors = neighbor_counts(e.concentration.entries);
    for (std::size_t i = 0; i < e.geometry.size(); ++i) {
      w.row(i, x_sums[i], e.iteration.column_sums[i], e.iteration.row_sums[i], neighbors[i],
            e.iteration.doubly_stochastic);
    }
  }
  log << "build-matrix: N=" << e.geometry.size() << " T0=" << csv::format(e.horizon)
      << " doubly_stochastic=" << csv::format(e.iteration.doubly_stochastic) << '\n';
  return kExitOk;
}

int cmd_spectrum(const ExperimentConfig& config, std::ostream& log) {
  const Experiment e = prepare_experiment(config);
  report_warnings(e, log);
  const fs::path dir = output_dir(config);
  const csv::Metadata meta = base_metadata(e);
  const Matrix& xt = e.iteration.entries;
  const bool symmetric = is_symmetric(xt);

  std::optional<SpectralSummary> spectrum;
  if (symmetric) spectrum = eigendecompose_symmetric(xt);

  if (spectrum && wants(config, "spectrum.csv")) {
    auto out = open_output(dir / "spectrum.csv");
    csv::Writer w(out, meta, {"index", "eigenvalue", "abs_eigenvalue"});
    for (std::size_t k = 0; k < spectrum->eigenvalues.size(); ++k) {
      w.row(k, spectrum->eigenvalues[k], std::abs(spectrum->eigenvalues[k]));
    }
  }

  const PowerResult power = lambda2_power(xt);
  if (wants(config, "lambda2.csv")) {
    auto out = open_output(dir / "lambda2.csv");
    csv::Writer w(out, meta, {"method", "lambda2", "iterations", "residual"});
    w.row("power", power.value, power.iterations, power.residual);
    if (spectrum && xt.rows() >= 2) {
      const Vector v2 = spectrum->eigenvectors.column(1);
      const Vector mv = xt * std::span<const double>(v2);
      double residual = 0.0;
      for (std::size_t i = 0; i < v2.size(); ++i) {
        residual = std::max(residual, std::abs(mv[i] - spectrum->lambda2 * v2[i]));
      }
      w.row("jacobi", spectrum->lambda2, spectrum->sweeps, residual);
    }
  }

  if (wants(config, "column_variance.csv")) {
    auto out = open_output(dir / "column_variance.csv");
    csv::Metadata cv = meta;
    cv.emplace_back("variance_estimator", "population");
    csv::Writer w(out, cv, {"epoch", "column_variance"});
    const Vector series = column_variance_series(xt, config.statistics.epochs);
    for (std::size_t n = 0; n < series.size(); ++n) w.row(n, series[n]);
  }
  log << "spectrum: |lambda2|=" << csv::format(power.value) << " (" << power.iterations
      << " power iterations)\n";
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
  if (!config.statistics.seed) {
    throw ValidationError("statistics.seed", "simulate needs a seed for the initial estimates");
  }
  const Experiment e = prepare_experiment(config);
  report_warnings(e, log);
  const fs::path dir = output_dir(config);
  const csv::Metadata meta = base_metadata(e);
  const StatisticsSpec& st = config.statistics;
  const std::size_t n = e.geometry.size();

  const Vector rho0 = draw_initial_estimates(n, st.mu, st.sigma0_sq, *st.seed);
  const Trajectory traj = run_until(ConsensusState{rho0, 0}, e.iteration, st.tol, st.max_epochs);
  // Compact clusters also get the single-epoch value sensed at the centre.
  std::optional<double> one_shot;
  if (config.geometry.kind == GeometryKind::cluster) {
    one_shot = compact_one_shot(rho0, center_responses(e.geometry, e.horizon));
  }

  if (wants(config, "trajectory.csv")) {
    auto out = open_output(dir / "trajectory.csv");
    csv::Metadata tm = meta;
    tm.emplace_back("criterion", traj.criterion == ConvergenceCriterion::distance_to_average
                                     ? "distance_to_average"
                                     : "spread");
    tm.emplace_back("converged", csv::format(traj.converged));
    tm.emplace_back("epochs", std::to_string(traj.epochs));
    tm.emplace_back("consensus_value", csv::format(traj.consensus_value));
    tm.emplace_back("final_error", csv::format(traj.final_error));
    if (one_shot) tm.emplace_back("one_shot_consensus", csv::format(*one_shot));
    csv::Writer w(out, tm, {"epoch", "node_id", "estimate"});
    for (std::size_t k = 0; k < traj.estimates.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) w.row(k, i, traj.estimates[k][i]);
    }
  }

  if (st.trials > 0) {
    MonteCarloOptions mc;
    mc.mu = st.mu;
    mc.sigma0_sq = st.sigma0_sq;
    mc.trials = st.trials;
    mc.epochs = st.epochs;
    mc.seed = *st.seed;
    mc.threads = st.threads;
    const TrialEnsemble ens = monte_carlo(e.iteration.entries, mc);
    if (ens.negative_estimates > 0) {
      log << "warning: " << ens.negative_estimates
          << " (trial, epoch, node) estimates were negative\n";
    }
    if (wants(config, "ensemble.csv")) {
      auto out = open_output(dir / "ensemble.csv");
      csv::Metadata em = meta;
      em.emplace_back("trials", std::to_string(st.trials));
      em.emplace_back("variance_estimator", "sample (divisor trials - 1)");
      em.emplace_back("negative_estimates", std::to_string(ens.negative_estimates));
      csv::Writer w(out, em,
                    {"epoch", "node_id", "empirical_mean", "empirical_var", "analytic_var",
                     "lambda2_bound"});
      for (std::size_t k = 0; k < ens.epochs.size(); ++k) {
        const EpochStatistics& s = ens.epochs[k];
        for (std::size_t i = 0; i < n; ++i) {
          w.row(k, i, s.mean[i], s.variance[i], s.analytic_variance[i], s.lambda2_bound);
        }
      }
    }
  }

  log << "simulate: " << (traj.converged ? "converged" : "not converged") << " after "
      << traj.epochs << " epochs, consensus " << csv::format(traj.consensus_value) << '\n';
  if (one_shot) {
    log << "simulate: one-shot consensus at the cluster centre " << csv::format(*one_shot)
        << " (initial average " << csv::format(traj.initial_average) << ")\n";
  }
  return traj.converged ? kExitOk : kExitNotConverged;
}

std::string sweep_key(const std::string& parameter) {
  if (parameter == "N") return "geometry.N";
  if (parameter == "N_prime") return "matrix.N_prime";
  if (parameter == "epsilon") return "matrix.epsilon";
  if (parameter == "a") return "geometry.a";
  if (parameter.find('.') != std::string::npos) return parameter;
  throw ValidationError("--param", "unknown sweep parameter '" + parameter +
                                       "' (use N, N_prime, epsilon, a or section.key)");
}

int cmd_sweep(std::string_view document, const std::vector<std::string>& overrides,
              const SweepSpec& sweep, std::ostream& log) {
  if (sweep.values.empty()) throw ValidationError("--values", "at least one value is required");
  const std::string key = sweep_key(sweep.parameter);
  const ExperimentConfig base = parse_config(document, overrides);
  if (!base.statistics.seed) {
    throw ValidationError("statistics.seed", "sweep needs a seed for epochs-to-tolerance runs");
  }
  const fs::path dir = output_dir(base);

  auto out = open_output(dir / "sweep.csv");
  csv::Metadata meta{{"tool", std::string("dbmc ") + DBMC_VERSION},
                     {"config_hash", "fnv1a64:" + base.hash},
                     {"sweep", key},
                     {"normalization", std::string(to_string(base.matrix.normalization))},
                     {"variance_estimator", "population"}};
  csv::Writer w(out, meta,
                {"parameter", "value", "lambda2", "epochs_to_tol", "converged",
                 "final_column_variance"});

  int status = kExitOk;
  for (const std::string& value : sweep.values) {
    std::vector<std::string> with_value = overrides;
    with_value.push_back(key + "=" + value);
    ExperimentConfig config = parse_config(document, with_value);

    if (!sweep.command.empty()) {
      ExperimentConfig sub = config;
      sub.output.directory = (dir / (sweep.parameter + "=" + value)).string();
      int rc = kExitOk;
      if (sweep.command == "build-matrix") {
        rc = cmd_build_matrix(sub, log);
      } else if (sweep.command == "spectrum") {
        rc = cmd_spectrum(sub, log);
      } else if (sweep.command == "simulate") {
        rc = cmd_simulate(sub, log);
      } else {
        throw ValidationError("--command", "unknown command '" + sweep.command + "'");
      }
      status = std::max(status, rc);
    }

    const Experiment e = prepare_experiment(config);
    const StatisticsSpec& st = config.statistics;
    const Vector rho0 = draw_initial_estimates(e.geometry.size(), st.mu, st.sigma0_sq, *st.seed);
    const Trajectory traj =
        run_until(ConsensusState{rho0, 0}, e.iteration, st.tol, st.max_epochs);
    const double final_metric = matrix_power_column_variance(e.iteration.entries, st.epochs);
    const double lambda2 = abs_lambda2(e.iteration.entries);
    w.row(sweep.parameter, value, lambda2, traj.epochs, traj.converged, final_metric);
    log << "sweep " << sweep.parameter << "=" << value << ": |lambda2|=" << csv::format(lambda2)
        << '\n';
  }
  return status;
}

}  // namespace dbmc
