#include "dbmc/spectral.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "dbmc/errors.hpp"
#include "dbmc/rng.hpp"

namespace dbmc {
namespace {

constexpr int kMaxSweeps = 100;

double frobenius_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

// Sum-zero projection: removes the component along the all-ones vector.
void project_out_mean(Vector& v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void fix_sign(Matrix& q, std::size_t col) {
  double best = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) best = std::max(best, std::abs(q(i, col)));
  for (std::size_t i = 0; i < q.rows(); ++i) {
    if (std::abs(q(i, col)) >= best - 1e-12) {
      if (q(i, col) < 0.0) {
        for (std::size_t k = 0; k < q.rows(); ++k) q(k, col) = -q(k, col);
      }
      return;
    }
  }
}

}  // namespace

SpectralSummary eigendecompose_symmetric(const Matrix& m, double symmetry_tolerance) {
  if (!m.square()) throw ModeError("eigendecompose_symmetric: matrix is not square");
  const double asym = m.max_asymmetry();
  if (asym > symmetry_tolerance) {
    std::ostringstream msg;
    msg << "eigendecompose_symmetric: max asymmetry " << asym << " exceeds " << symmetry_tolerance
        << "; use lambda2_power for non-symmetric matrices";
    throw ModeError(msg.str());
  }

  const std::size_t n = m.rows();
  Matrix a = 0.5 * (m + m.transposed());
  Matrix v = Matrix::identity(n);

  SpectralSummary out;
  const double eps = std::numeric_limits<double>::epsilon();
  const double negligible = eps * eps * std::sqrt(frobenius_sq(a));
  int sweep = 0;
  bool rotated = n > 1;
  while (rotated) {
    rotated = false;
    if (++sweep > kMaxSweeps) {
      throw ConvergenceError("eigendecompose_symmetric: Jacobi sweeps did not converge");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        // Relative criterion: skip entries below rounding of the diagonal.
        if (std::abs(apq) <= eps * std::sqrt(std::abs(a(p, p) * a(q, q))) ||
            std::abs(apq) <= negligible) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  out.sweeps = sweep;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const double al = std::abs(a(l, l));
    const double ar = std::abs(a(r, r));
    if (al != ar) return al > ar;
    return a(l, l) > a(r, r);
  });

  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    fix_sign(out.eigenvectors, k);
  }
  out.lambda2 = n >= 2 ? out.eigenvalues[1] : 0.0;
  out.spectral_gap = 1.0 - std::abs(out.lambda2);
  if (n > 0) out.consensus_vector = out.eigenvectors.column(0);
  return out;
}

PowerResult lambda2_power(const Matrix& m, double tolerance, int max_iterations) {
  if (!m.square()) throw std::invalid_argument("lambda2_power: matrix is not square");
  const std::size_t n = m.rows();
  PowerResult result;
  if (n < 2) return result;

  Rng rng(0x5eed, /*stream=*/2);
  Vector x(n);
  for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
  project_out_mean(x);
  double nx = norm2(x);
  for (double& xi : x) xi /= nx;

  double previous = -1.0;
  double estimate = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Vector y = m * x;
    project_out_mean(y);
    Vector z = m * y;
    project_out_mean(z);
    const double nz = norm2(z);
    result.iterations = it;
    if (nz == 0.0) {
      // M annihilates the sum-zero subspace within two steps.
      result.value = 0.0;
      result.residual = 0.0;
      return result;
    }
    estimate = std::sqrt(nz);
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
    if (previous >= 0.0 && std::abs(estimate - previous) <= tolerance * estimate) {
      const Vector mx = m * x;
      double rayleigh = 0.0;
      for (std::size_t i = 0; i < n; ++i) rayleigh += x[i] * mx[i];
      const double signed_value = rayleigh < 0.0 ? -estimate : estimate;
      double residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        residual = std::max(residual, std::abs(mx[i] - signed_value * x[i]));
      }
      result.value = estimate;
      result.residual = residual;
      return result;
    }
    previous = estimate;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "lambda2_power: no convergence after " << max_iterations
      << " iterations; last two estimates " << previous << " and " << estimate
      << " (|lambda2| and |lambda3| may coincide)";
  throw ConvergenceError(msg.str());
}

MarkovStructure markov_structure_check(const Matrix& m) {
  const std::size_t n = m.rows();
  MarkovStructure out;
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) > 0.0) out.aperiodic = true;
  }
  if (n == 0) return out;

  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t w = 0; w < n; ++w) {
        const double edge = transpose ? m(w, u) : m(u, w);
        if (edge > 0.0 && !seen[w]) {
          seen[w] = true;
          ++count;
          frontier.push(w);
        }
      }
    }
    return count == n;
  };
  out.irreducible = reaches_all(false) && reaches_all(true);
  return out;
}

CovariancePrediction predict_covariance(const Matrix& x, unsigned n, double sigma0_sq,
                                        const SpectralSummary* spectrum) {
  if (!x.square()) throw ModeError("predict_covariance: matrix is not square");
  if (x.max_asymmetry() > 1e-9) {
    throw ModeError("predict_covariance: closed-form prediction needs a symmetric matrix");
  }
  if (sigma0_sq < 0.0) throw DomainError("predict_covariance: sigma0_sq must be non-negative");

  SpectralSummary local;
  if (!spectrum) {
    local = eigendecompose_symmetric(x);
    spectrum = &local;
  }

  const std::size_t size = x.rows();
  CovariancePrediction out;
  out.epoch = n;
  out.sigma0_sq = sigma0_sq;
  out.full = matrix_power(x, 2 * n);
  out.full *= sigma0_sq;
  out.diagonal.resize(size);
  for (std::size_t i = 0; i < size; ++i) out.diagonal[i] = out.full(i, i);

  const double inv_n = 1.0 / static_cast<double>(size);
  const double decay = std::pow(spectrum->lambda2, 2.0 * n);
  out.bound = sigma0_sq * (inv_n + decay);
  out.lambda2_approx.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double v2 = size >= 2 ? spectrum->eigenvectors(i, 1) : 0.0;
    out.lambda2_approx[i] = sigma0_sq * (inv_n + v2 * v2 * decay);
  }
  return out;
}

Matrix propagate_covariance(const Matrix& x, unsigned n, std::span<const double> cov0_diagonal) {
  if (!x.square() || cov0_diagonal.size() != x.rows()) {
    throw std::invalid_argument("propagate_covariance: dimension mismatch");
  }
  const Matrix p = matrix_power(x, n);
  Matrix scaled = p;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) scaled(i, j) *= cov0_diagonal[j];
  return scaled * p.transposed();
}

namespace {

double column_variance_sum(const Matrix& p) {
  const std::size_t n = p.rows();
  double total = 0.0;
  for (std::size_t j = 0; j < p.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += p(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (p(i, j) - mean) * (p(i, j) - mean);
    total += var / static_cast<double>(n);
  }
  return total;
}

}  // namespace

double matrix_power_column_variance(const Matrix& x, unsigned n) {
  return column_variance_sum(matrix_power(x, n));
}

Vector column_variance_series(const Matrix& x, unsigned max_n) {
  Vector series;
  series.reserve(max_n + 1);
  Matrix p = Matrix::identity(x.rows());
  series.push_back(column_variance_sum(p));
  for (unsigned k = 1; k <= max_n; ++k) {
    p = x * p;
    series.push_back(column_variance_sum(p));
  }
  return series;
}

}  // namespace dbmc
