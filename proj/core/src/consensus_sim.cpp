#include "dbmc/consensus_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "dbmc/errors.hpp"
#include "dbmc/rng.hpp"

namespace dbmc {

ConsensusState run_epoch(const ConsensusState& state, const Matrix& iteration) {
  if (iteration.rows() != state.estimates.size() || !iteration.square()) {
    throw std::invalid_argument("run_epoch: iteration matrix does not match the state");
  }
  return ConsensusState{iteration * std::span<const double>(state.estimates), state.epoch + 1};
}

ConsensusState run_epoch(const ConsensusState& state, const IterationMatrix& iteration) {
  return run_epoch(state, iteration.entries);
}

namespace {

double mean_of(const Vector& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double criterion_value(const Vector& rho, ConvergenceCriterion criterion, double average) {
  if (criterion == ConvergenceCriterion::spread) {
    const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
    return *hi - *lo;
  }
  double worst = 0.0;
  for (double r : rho) worst = std::max(worst, std::abs(r - average));
  return worst;
}

}  // namespace

Trajectory run_until(const ConsensusState& initial, const Matrix& iteration, double tolerance,
                     unsigned max_epochs, ConvergenceCriterion criterion) {
  if (!(tolerance > 0.0)) throw DomainError("run_until: tolerance must be positive");
  if (initial.estimates.empty()) throw std::invalid_argument("run_until: empty state");

  Trajectory out;
  out.criterion = criterion;
  out.initial_average = mean_of(initial.estimates);
  const double threshold = criterion == ConvergenceCriterion::distance_to_average
                               ? tolerance * std::max(1.0, std::abs(out.initial_average))
                               : tolerance;

  ConsensusState state = initial;
  out.estimates.push_back(state.estimates);
  for (unsigned n = 0;; ++n) {
    out.final_error = criterion_value(state.estimates, criterion, out.initial_average);
    out.epochs = n;
    if (out.final_error <= threshold) {
      out.converged = true;
      break;
    }
    if (n == max_epochs) break;
    state = run_epoch(state, iteration);
    out.estimates.push_back(state.estimates);
  }
  out.consensus_value = mean_of(out.estimates.back());
  return out;
}

Trajectory run_until(const ConsensusState& initial, const IterationMatrix& iteration,
                     double tolerance, unsigned max_epochs) {
  const auto criterion = iteration.doubly_stochastic ? ConvergenceCriterion::distance_to_average
                                                     : ConvergenceCriterion::spread;
  return run_until(initial, iteration.entries, tolerance, max_epochs, criterion);
}

double compact_one_shot(std::span<const double> estimates, std::span<const double> center_response) {
  const Vector rates = compact_rates(estimates, center_response);
  double c = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) c += rates[j] * center_response[j];
  return c;
}

EpochSchedule epoch_schedule(double radius, double diffusion_coefficient, double k) {
  if (!(radius > 0.0)) throw ValidationError("schedule.R", "effective radius must be positive");
  if (!(diffusion_coefficient > 0.0)) throw ValidationError("medium.D", "must be positive");
  if (!(k > 0.0)) throw ValidationError("schedule.k", "must be positive");
  EpochSchedule s;
  s.k = k;
  s.horizon = k * radius * radius / diffusion_coefficient;
  s.waiting_time = s.horizon;
  s.iteration_time = s.horizon + s.waiting_time;
  return s;
}

Vector draw_initial_estimates(std::size_t nodes, double mu, double sigma0_sq, std::uint64_t seed,
                              std::uint64_t stream) {
  Rng rng(seed, stream);
  const double sd = std::sqrt(sigma0_sq);
  Vector rho(nodes);
  for (double& r : rho) r = rng.normal(mu, sd);
  return rho;
}

namespace {

constexpr std::size_t kBlockTrials = 256;

// Welford accumulator per (epoch, node), optionally with the co-moment
// matrix per epoch.
struct BlockAccumulator {
  std::size_t count = 0;
  std::vector<Vector> mean;
  std::vector<Vector> m2;
  std::vector<Matrix> comoment;
  std::uint64_t negatives = 0;

  BlockAccumulator(unsigned epochs, std::size_t nodes, bool full)
      : mean(epochs + 1, Vector(nodes, 0.0)), m2(epochs + 1, Vector(nodes, 0.0)) {
    if (full) comoment.assign(epochs + 1, Matrix(nodes, nodes));
  }

  void add(unsigned epoch, const Vector& x, std::size_t k) {
    Vector& mu = mean[epoch];
    Vector& s = m2[epoch];
    const std::size_t n = x.size();
    Vector delta(n);
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = x[i] - mu[i];
      mu[i] += delta[i] / static_cast<double>(k);
      s[i] += delta[i] * (x[i] - mu[i]);
    }
    if (!comoment.empty()) {
      Matrix& c = comoment[epoch];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) += delta[i] * (x[j] - mu[j]);
    }
  }

  // Chan et al. pairwise merge.
  void merge(const BlockAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    for (std::size_t e = 0; e < mean.size(); ++e) {
      const std::size_t nodes = mean[e].size();
      Vector delta(nodes);
      for (std::size_t i = 0; i < nodes; ++i) delta[i] = other.mean[e][i] - mean[e][i];
      for (std::size_t i = 0; i < nodes; ++i) {
        m2[e][i] += other.m2[e][i] + delta[i] * delta[i] * na * nb / n;
        mean[e][i] += delta[i] * nb / n;
      }
      if (!comoment.empty()) {
        for (std::size_t i = 0; i < nodes; ++i)
          for (std::size_t j = 0; j < nodes; ++j)
            comoment[e](i, j) += other.comoment[e](i, j) + delta[i] * delta[j] * na * nb / n;
      }
    }
    count += other.count;
    negatives += other.negatives;
  }
};

}  // namespace

TrialEnsemble monte_carlo(const Matrix& iteration, const MonteCarloOptions& options) {
  if (!iteration.square() || iteration.rows() == 0) {
    throw std::invalid_argument("monte_carlo: iteration matrix must be square and non-empty");
  }
  if (options.trials < 2) throw ValidationError("statistics.trials", "at least 2 trials are required");
  if (options.sigma0_sq < 0.0) throw ValidationError("statistics.sigma0_sq", "must be non-negative");

  const std::size_t nodes = iteration.rows();
  const bool full = options.full_covariance && nodes <= 32;
  const double sd = std::sqrt(options.sigma0_sq);
  const std::size_t blocks = (options.trials + kBlockTrials - 1) / kBlockTrials;

  std::vector<BlockAccumulator> partial;
  partial.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) partial.emplace_back(options.epochs, nodes, full);

  std::atomic<std::size_t> next_block{0};
  auto worker = [&] {
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      BlockAccumulator& acc = partial[b];
      const std::size_t first = b * kBlockTrials;
      const std::size_t last = std::min(options.trials, first + kBlockTrials);
      for (std::size_t t = first; t < last; ++t) {
        ++acc.count;
        Rng rng(options.seed, t + 1);
        Vector rho(nodes);
        for (double& r : rho) r = rng.normal(options.mu, sd);
        for (unsigned e = 0;; ++e) {
          for (double r : rho) acc.negatives += r < 0.0 ? 1 : 0;
          acc.add(e, rho, acc.count);
          if (e == options.epochs) break;
          rho = iteration * std::span<const double>(rho);
        }
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, blocks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  BlockAccumulator total(options.epochs, nodes, full);
  for (const BlockAccumulator& p : partial) total.merge(p);

  TrialEnsemble out;
  out.options = options;
  out.negative_estimates = total.negatives;

  const bool symmetric = iteration.max_asymmetry() <= 1e-9;
  if (nodes >= 2) {
    out.lambda2 = symmetric ? eigendecompose_symmetric(iteration).lambda2
                            : lambda2_power(iteration).value;
  }

  const double denom = static_cast<double>(total.count - 1);
  const Vector cov0(nodes, options.sigma0_sq);
  Matrix power = Matrix::identity(nodes);
  for (unsigned e = 0; e <= options.epochs; ++e) {
    EpochStatistics stats;
    stats.mean = total.mean[e];
    stats.variance = total.m2[e];
    for (double& v : stats.variance) v /= denom;
    if (full) {
      stats.covariance = total.comoment[e];
      stats.covariance *= 1.0 / denom;
    }
    // X^n sigma0^2 I (X^n)^T
    const Matrix cov = (power * options.sigma0_sq) * power.transposed();
    stats.analytic_variance.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) stats.analytic_variance[i] = cov(i, i);
    stats.lambda2_bound = options.sigma0_sq * (1.0 / static_cast<double>(nodes) +
                                               std::pow(out.lambda2, 2.0 * e));
    out.epochs.push_back(std::move(stats));
    power = iteration * power;
  }
  return out;
}

}  // namespace dbmc
