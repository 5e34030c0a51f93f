#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbmc/concentration_matrix.hpp"
#include "dbmc/matrix.hpp"
#include "dbmc/spectral.hpp"

namespace dbmc {

struct ConsensusState {
  Vector estimates;  // rho(n)
  unsigned epoch = 0;
};

// One synchronous round: every node emits at rate rho_i / S for T0, the
// channel is reset during the waiting interval, and each node adopts the
// concentration it sensed: rho(n+1) = X~ rho(n).
ConsensusState run_epoch(const ConsensusState& state, const Matrix& iteration);
ConsensusState run_epoch(const ConsensusState& state, const IterationMatrix& iteration);

enum class ConvergenceCriterion {
  // max_i |rho_i(n) - rho_av(0)| <= tol * max(1, |rho_av(0)|)
  distance_to_average,
  // max_i rho_i(n) - min_i rho_i(n) <= tol
  spread,
};

struct Trajectory {
  std::vector<Vector> estimates;  // estimates[n] = rho(n)
  bool converged = false;
  unsigned epochs = 0;            // epoch at which the criterion held, or max_epochs
  ConvergenceCriterion criterion = ConvergenceCriterion::distance_to_average;
  double initial_average = 0.0;
  double final_error = 0.0;       // criterion value at `epochs`
  double consensus_value = 0.0;   // mean of the final estimates
};

// Iterates until the criterion holds or max_epochs is reached (a
// non-converged trajectory is returned, not thrown).
Trajectory run_until(const ConsensusState& initial, const Matrix& iteration, double tolerance,
                     unsigned max_epochs, ConvergenceCriterion criterion);

// Picks distance_to_average for doubly stochastic X~, spread otherwise.
Trajectory run_until(const ConsensusState& initial, const IterationMatrix& iteration,
                     double tolerance, unsigned max_epochs);

// Compact network: with F_j = rho_j / (X_j N) the centre concentration
// sum_j F_j X_j equals the average in a single epoch.
double compact_one_shot(std::span<const double> estimates, std::span<const double> center_response);

struct EpochSchedule {
  double horizon = 0.0;         // T0 = k R^2 / D
  double waiting_time = 0.0;    // equal to T0
  double k = 1.0;
  double iteration_time = 0.0;  // emission plus waiting, 2 T0
};

EpochSchedule epoch_schedule(double radius, double diffusion_coefficient, double k = 1.0);

struct MonteCarloOptions {
  double mu = 0.0;
  double sigma0_sq = 1.0;
  std::size_t trials = 1000;
  unsigned epochs = 10;
  std::uint64_t seed = 0;
  bool full_covariance = false;  // only honoured for N <= 32
  unsigned threads = 0;          // 0: hardware concurrency
};

struct EpochStatistics {
  Vector mean;               // empirical per-node mean
  Vector variance;           // empirical per-node variance (divisor trials - 1)
  Vector analytic_variance;  // diag of X~^n Cov(0) (X~^n)^T
  double lambda2_bound = 0.0;  // sigma0^2 (1/N + lambda2^{2n})
  Matrix covariance;         // empty unless full_covariance
};

struct TrialEnsemble {
  MonteCarloOptions options;
  double lambda2 = 0.0;
  std::vector<EpochStatistics> epochs;  // index n = 0 .. options.epochs
  std::uint64_t negative_estimates = 0;  // (trial, epoch, node) triples below zero
};

// Draws rho(0) ~ N(mu, sigma0_sq) i.i.d. per node and trial and pushes every
// trial through `epochs` rounds. Trial t uses the generator stream t + 1 of
// `seed`; trials are processed in fixed blocks whose statistics are merged
// in block order, so results do not depend on the worker count.
TrialEnsemble monte_carlo(const Matrix& iteration, const MonteCarloOptions& options);

// Initial estimates of the deterministic single run (generator stream 0).
Vector draw_initial_estimates(std::size_t nodes, double mu, double sigma0_sq, std::uint64_t seed,
                              std::uint64_t stream = 0);

}  // namespace dbmc
