// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dbmc/commands.hpp"
#include "dbmc/concentration_matrix.hpp"
#include "dbmc/config.hpp"
#include "dbmc/consensus_sim.hpp"
#include "dbmc/diffusion_kernel.hpp"
#include "dbmc/network.hpp"
#include "dbmc/rng.hpp"
#include "dbmc/spectral.hpp"

namespace {

using namespace dbmc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const MediumParams kMedium{2, 1.0, 0.1};

// Wrapped line with a = 1, T0 = a^2 / D = 1.
IterationMatrix wrapped_line(std::size_t n, int budget, NormalizationMode mode) {
  const auto g = wrapped_line_network(n, 1.0, kMedium);
  const double horizon = epoch_schedule(1.0, kMedium.diffusion_coefficient).horizon;
  return normalize(sparsify(build_concentration_matrix(g, horizon), distance_matrix(g), budget), mode);
}

Matrix two_node() {
  Matrix m(2, 2);
  m(0, 0) = m(1, 1) = 0.6;
  m(0, 1) = m(1, 0) = 0.4;
  return m;
}

// Symmetric doubly stochastic test matrix: identity plus symmetrized
// permutations with random weights.
Matrix random_doubly_stochastic(std::size_t n, Rng& rng) {
  std::vector<double> w(5);
  for (double& v : w) v = rng.uniform(0.1, 1.0);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  Matrix m = Matrix::identity(n) * (w[0] / total);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next() % i]);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, perm[i]) += 0.5 * w[k] / total;
      m(perm[i], i) += 0.5 * w[k] / total;
    }
  }
  return m;
}

Outcome kernel_oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(2024, 1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int m = 1 + static_cast<int>(rng.next() % 3);
    const double d = rng.uniform(0.1, 10.0);
    const double x = rng.uniform(0.1, 10.0);
    const double horizon = rng.uniform(0.1, 10.0);
    const MediumParams md{m, d, 0.1};
    const double quad = cumulative_response(x, horizon, md).value;
    const double oracle = closed_form_response(x, horizon, md).value;
    worst = std::max(worst, std::abs(quad - oracle) / oracle);
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-8, "relative error above 1e-8");
  o.require(elapsed < 5.0, "runtime above 5 s");
  o.note(fmt("max relative error %.2e, %.3f s", worst, elapsed));
  return o;
}

Outcome perron_frobenius() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto it = wrapped_line(24, 5, NormalizationMode::uniform_S);
  const auto s = eigendecompose_symmetric(it.entries);
  const double elapsed = seconds_since(t0);
  const double v = 1.0 / std::sqrt(24.0);
  double vec_err = 0.0;
  for (double c : s.consensus_vector) vec_err = std::max(vec_err, std::abs(c - v));
  o.require(std::abs(s.eigenvalues[0] - 1.0) <= 1e-10, "lambda1 not 1 within 1e-10");
  o.require(vec_err <= 1e-8, "consensus vector off by more than 1e-8");
  o.require(std::abs(s.lambda2) < 1.0, "|lambda2| not below 1");
  o.require(elapsed < 1.0, "runtime above 1 s");
  o.note(fmt("|lambda1 - 1| = %.1e, vector error %.1e", std::abs(s.eigenvalues[0] - 1.0), vec_err));
  o.note(fmt("|lambda2| = %.6f, %.3f s", std::abs(s.lambda2), elapsed));
  return o;
}

Outcome compact_one_shot_consensus() {
  Outcome o;
  const MediumParams md{3, 1.0, 0.01};
  const auto g = compact_cluster(5, 0.05, md, 31);
  const auto xj = center_responses(g, 1.0);
  Rng rng(77, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector rho(5);
    for (double& r : rho) r = rng.normal(10.0, 3.0);
    const double avg = std::accumulate(rho.begin(), rho.end(), 0.0) / 5.0;
    worst = std::max(worst, std::abs(compact_one_shot(rho, xj) - avg) / std::abs(avg));
  }
  o.require(worst <= 1e-12, "one-shot value off the average by more than 1e-12 relative");
  o.note(fmt("max relative error %.2e over 100 trials", worst));
  return o;
}

Outcome convergence_to_average() {
  Outcome o;
  const auto it = wrapped_line(24, 5, NormalizationMode::uniform_S);
  o.require(it.doubly_stochastic, "matrix not doubly stochastic");
  const auto s = eigendecompose_symmetric(it.entries);
  const double l2 = std::abs(s.lambda2);
  // First eigenvalue magnitude distinct from |lambda2| (the ring's pairs are
  // degenerate); it sets how fast the transient dies.
  double next = 0.0;
  for (std::size_t k = 2; k < s.eigenvalues.size(); ++k) {
    if (std::abs(s.eigenvalues[k]) < l2 - 1e-9) {
      next = std::abs(s.eigenvalues[k]);
      break;
    }
  }
  const unsigned bound = static_cast<unsigned>(std::ceil(std::log(1e-8) / std::log(l2))) + 5;
  const auto rho0 = draw_initial_estimates(24, 0.0, 1.0, 42);
  const auto t = run_until(ConsensusState{rho0, 0}, it, 1e-8, 100000);
  o.require(t.converged, "did not converge");
  o.require(t.epochs <= bound, "needed " + std::to_string(t.epochs) + " epochs, bound " + std::to_string(bound));

  // transient: epochs where the faster modes still carry more than 1e-3
  // of the slow-mode weight
  const unsigned transient = static_cast<unsigned>(std::ceil(std::log(1e-3) / std::log(next / l2)));
  double worst = 0.0;
  std::size_t checked = 0;
  auto err = [&](const Vector& v) {
    double e = 0.0;
    for (double x : v) e = std::max(e, std::abs(x - t.initial_average));
    return e;
  };
  for (std::size_t n = transient + 1; n < t.estimates.size(); ++n) {
    const double ratio = err(t.estimates[n]) / err(t.estimates[n - 1]);
    worst = std::max(worst, std::abs(ratio - l2));
    ++checked;
  }
  o.require(checked > 0, "no post-transient epochs");
  o.require(worst <= 0.05, "error ratio strays from |lambda2| by more than 0.05");
  o.note(fmt("|lambda2| = %.6f, epochs %.0f", l2, double(t.epochs)) + " <= " + std::to_string(bound));
  o.note(fmt("max |ratio - |lambda2|| = %.2e after epoch %.0f", worst, double(transient)));
  return o;
}

// Standard error of an empirical variance of Gaussian data.
double variance_se(double v, double trials) { return v * std::sqrt(2.0 / (trials - 1.0)); }

TrialEnsemble two_node_ensemble() {
  MonteCarloOptions opt;
  opt.mu = 0.0;
  opt.sigma0_sq = 1.0;
  opt.trials = 100000;
  opt.epochs = 5;
  opt.seed = 20240601;
  return monte_carlo(two_node(), opt);
}

Outcome covariance_law(const TrialEnsemble& ens, double elapsed) {
  Outcome o;
  const double trials = double(ens.options.trials);
  // sigma0^2 diag(X^{2n}) for X = [[0.6,0.4],[0.4,0.6]] is 0.5 + 0.5 * 0.2^{2n}
  o.require(std::abs(0.5 + 0.5 * 0.04 - 0.52) < 1e-15, "hand value");
  o.require(std::abs(ens.epochs[1].analytic_variance[0] - 0.52) < 1e-14, "analytic variance at n=1 is not 0.52");
  double worst_var = 0.0, worst_mean = 0.0;
  for (unsigned n = 1; n <= 5; ++n) {
    const double expected = 0.5 + 0.5 * std::pow(0.2, 2.0 * n);
    const auto& s = ens.epochs[n];
    for (std::size_t i = 0; i < 2; ++i) {
      worst_var = std::max(worst_var, std::abs(s.variance[i] - expected) / variance_se(expected, trials));
      o.require(std::abs(s.analytic_variance[i] - expected) < 1e-14, "analytic variance mismatch");
    }
  }
  for (unsigned n = 0; n <= 5; ++n) {
    const auto& s = ens.epochs[n];
    for (std::size_t i = 0; i < 2; ++i) {
      const double se = std::sqrt(s.analytic_variance[i] / trials);
      worst_mean = std::max(worst_mean, std::abs(s.mean[i] - ens.options.mu) / se);
    }
  }
  o.require(worst_var <= 5.0, "variance more than 5 SE from the law");
  o.require(worst_mean <= 5.0, "mean more than 5 SE from mu");
  o.require(elapsed < 30.0, "runtime above 30 s");
  o.note(fmt("variance within %.2f SE, mean within %.2f SE", worst_var, worst_mean));
  o.note(fmt("empirical var at n=1: %.5f, %.2f s", ens.epochs[1].variance[0], elapsed));
  return o;
}

Outcome variance_bound(const TrialEnsemble& two) {
  Outcome o;
  auto check = [&](const TrialEnsemble& ens, std::size_t n_nodes, const char* name) {
    const double trials = double(ens.options.trials);
    double worst = -1e300;
    for (std::size_t n = 0; n < ens.epochs.size(); ++n) {
      const double l2n = std::pow(ens.lambda2, 2.0 * double(n));
      const double bound = ens.options.sigma0_sq * (1.0 / double(n_nodes) + l2n);
      for (std::size_t i = 0; i < n_nodes; ++i) {
        const double v = ens.epochs[n].variance[i];
        const double slack = 5.0 * variance_se(ens.epochs[n].analytic_variance[i], trials);
        worst = std::max(worst, (v - bound) / slack);
      }
    }
    o.require(worst <= 1.0, std::string(name) + ": variance above bound + 5 SE");
    o.note(std::string(name) + fmt(": max (var - bound) / 5SE = %.2f", worst));
  };
  check(two, 2, "2-node");

  const auto it = wrapped_line(24, 5, NormalizationMode::uniform_S);
  MonteCarloOptions opt;
  opt.trials = 10000;
  opt.epochs = 150;
  opt.seed = 99;
  const auto ring = monte_carlo(it.entries, opt);
  check(ring, 24, "ring");

  const auto s = eigendecompose_symmetric(it.entries);
  const double l2 = std::abs(s.lambda2);
  const unsigned floor_epoch = static_cast<unsigned>(std::ceil(std::log(1e-12) / (2.0 * std::log(l2))));
  double worst = 0.0;
  for (unsigned n : {floor_epoch, floor_epoch + 1, 2 * floor_epoch}) {
    const auto p = predict_covariance(it.entries, n, 1.0, &s);
    for (double d : p.diagonal) worst = std::max(worst, std::abs(d - 1.0 / 24.0));
  }
  o.require(worst <= 1e-10, "analytic diagonal not at sigma0^2/N within 1e-10");
  o.note(fmt("floor reached from epoch %.0f, max deviation %.1e", double(floor_epoch), worst));
  return o;
}

Outcome fig3_qualitative() {
  Outcome o;
  const auto t0 = Clock::now();
  // Long enough that every series reaches its limit in double precision.
  const unsigned horizon = 1000;
  const std::vector<std::size_t> sizes{10, 20, 40};
  std::vector<Vector> series;
  for (std::size_t n : sizes) {
    const auto g = line_network(n, 1.0, kMedium);
    const double t_0 = epoch_schedule(1.0, kMedium.diffusion_coefficient).horizon;
    const auto it = normalize(sparsify(build_concentration_matrix(g, t_0), distance_matrix(g), 5),
                              NormalizationMode::column_normalized);
    series.push_back(column_variance_series(it.entries, horizon));
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    unsigned first_bad = 0;
    for (unsigned n = 2; n <= horizon && first_bad == 0; ++n)
      if (!(series[k][n] < series[k][n - 1])) first_bad = n;
    o.require(first_bad == 0, "N=" + std::to_string(sizes[k]) + " not strictly decreasing at n=" +
                                  std::to_string(first_bad));
  }
  unsigned first_unordered = 0;
  for (unsigned n = 3; n <= horizon && first_unordered == 0; ++n)
    for (std::size_t k = 1; k < sizes.size(); ++k)
      if (!(series[k - 1][n] < series[k][n])) first_unordered = n;
  if (first_unordered != 0) {
    o.require(false, "ordering in N reverses at n=" + std::to_string(first_unordered));
    o.note(fmt("limits N=10: %.3e, N=20: %.3e", series[0][horizon], series[1][horizon]));
  } else {
    o.note("ordered for 3 <= n <= " + std::to_string(horizon));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime above 10 s");
  o.note(fmt("%.2f s", elapsed));
  return o;
}

Outcome sparsity_lambda2() {
  Outcome o;
  std::vector<double> l2;
  std::string values;
  for (int budget : {2, 4, 8, 16, 23}) {
    const auto it = wrapped_line(24, budget, NormalizationMode::uniform_S);
    l2.push_back(std::abs(eigendecompose_symmetric(it.entries).lambda2));
    values += (values.empty() ? "" : ", ") + fmt("%.6f", l2.back());
  }
  for (std::size_t k = 1; k < l2.size(); ++k)
    o.require(l2[k] <= l2[k - 1], "|lambda2| increases with N'");
  o.note("|lambda2| = [" + values + "]");

  const Matrix id = Matrix::identity(24);
  const auto s = eigendecompose_symmetric(id);
  o.require(s.lambda2 == 1.0, "identity lambda2 is not 1");
  const auto cv = column_variance_series(id, 50);
  bool constant = true;
  for (double v : cv) constant = constant && v == cv[0];
  o.require(constant, "identity column variance not constant");
  o.note(fmt("identity: lambda2 = %.1f, metric %.6f", s.lambda2, cv[0]));
  return o;
}

Outcome spectral_path_equivalence() {
  Outcome o;
  Rng rng(4242, 9);
  double worst_path = 0.0, worst_power = 0.0;
  std::vector<Matrix> cases;
  for (std::size_t n = 2; n <= 12; ++n) cases.push_back(random_doubly_stochastic(n, rng));
  cases.push_back(wrapped_line(12, 3, NormalizationMode::uniform_S).entries);
  cases.push_back(two_node());
  for (const auto& m : cases) {
    const std::size_t n = m.rows();
    const auto s = eigendecompose_symmetric(m);
    Vector rho(n);
    for (double& r : rho) r = rng.normal();
    const Vector coeff = s.eigenvectors.transposed() * rho;
    ConsensusState state{rho, 0};
    for (unsigned e = 1; e <= 50; ++e) {
      state = run_epoch(state, m);
      Vector scaled(n);
      for (std::size_t k = 0; k < n; ++k) scaled[k] = std::pow(s.eigenvalues[k], double(e)) * coeff[k];
      const Vector spectral = s.eigenvectors * scaled;
      for (std::size_t i = 0; i < n; ++i) worst_path = std::max(worst_path, std::abs(state.estimates[i] - spectral[i]));
    }
    worst_power = std::max(worst_power, std::abs(lambda2_power(m).value - std::abs(s.lambda2)));
  }
  o.require(worst_path <= 1e-8, "direct and spectral paths differ by more than 1e-8");
  o.require(worst_power <= 1e-8, "power-method |lambda2| differs by more than 1e-8");
  o.note(fmt("path difference %.1e, power difference %.1e", worst_path, worst_power));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "dbmc_acceptance_determinism";
  fs::remove_all(base);
  const std::string doc = R"({
    "geometry": {"kind": "wrapped_line", "N": 24, "a": 1.0},
    "medium": {"m": 2, "D": 1.0, "node_radius": 0.1},
    "matrix": {"normalization": "uniform_S", "N_prime": 5},
    "statistics": {"trials": 2000, "epochs": 30, "seed": 42}})";
  std::vector<int> codes;
  for (const char* run : {"a", "b"}) {
    const std::vector<std::string> overrides{"output.directory=\"" + (base / run).string() + "\""};
    std::ostringstream log;
    codes.push_back(cmd_simulate(parse_config(doc, overrides), log));
  }
  o.require(codes[0] == codes[1], "exit codes differ");
  std::size_t bytes = 0;
  for (const char* f : {"trajectory.csv", "ensemble.csv"}) {
    const auto a = slurp(base / "a" / f);
    const auto b = slurp(base / "b" / f);
    o.require(!a.empty(), std::string(f) + " missing");
    o.require(a == b, std::string(f) + " differs");
    bytes += a.size();
  }
  o.note("trajectory.csv and ensemble.csv identical, " + std::to_string(bytes) + " bytes");
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s (%s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "kernel quadrature matches closed forms", kernel_oracle_equivalence);
  report(2, "Perron-Frobenius on the wrapped line", perron_frobenius);
  report(3, "compact cluster one-shot consensus", compact_one_shot_consensus);
  report(4, "geometric convergence to the average", convergence_to_average);

  const auto t0 = Clock::now();
  const auto two = two_node_ensemble();
  const double two_elapsed = seconds_since(t0);
  report(5, "covariance law on the 2-node matrix", [&] { return covariance_law(two, two_elapsed); });
  report(6, "variance bound and floor", [&] { return variance_bound(two); });

  report(7, "column-variance decay on line networks", fig3_qualitative);
  report(8, "sparsity raises |lambda2|; identity never mixes", sparsity_lambda2);
  report(9, "direct iteration equals the spectral path", spectral_path_equivalence);
  report(10, "simulate output is byte-identical across runs", determinism);

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
