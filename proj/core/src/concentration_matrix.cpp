#include "dbmc/concentration_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dbmc/errors.hpp"

namespace dbmc {

std::string_view to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::column_normalized:
      return "column_normalized";
    case NormalizationMode::uniform_S:
      return "uniform_S";
  }
  return "unknown";
}

NormalizationMode parse_normalization_mode(std::string_view name) {
  if (name == "column_normalized") return NormalizationMode::column_normalized;
  if (name == "uniform_S") return NormalizationMode::uniform_S;
  throw ValidationError("matrix.normalization",
                        "expected column_normalized or uniform_S, got '" + std::string(name) + "'");
}

ConcentrationMatrix build_concentration_matrix(const NetworkGeometry& geometry, double horizon,
                                               const QuadratureOptions& options) {
  if (!(horizon > 0.0)) throw DomainError("build_concentration_matrix: T0 must be positive");
  const MediumParams& medium = geometry.medium();
  const std::size_t n = geometry.size();

  std::map<double, double> memo;
  auto response = [&](double distance) {
    const double clamped = std::max(distance, medium.node_radius);
    auto it = memo.find(clamped);
    if (it != memo.end()) return it->second;
    const double v = cumulative_response(clamped, horizon, medium, options).value;
    memo.emplace(clamped, v);
    return v;
  };

  Matrix x(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, i) = response(0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      x(i, j) = x(j, i) = response(geometry.distance(i, j));
    }
  }
  return ConcentrationMatrix{std::move(x), horizon, medium, std::nullopt};
}

ConcentrationMatrix sparsify(const ConcentrationMatrix& x, const DistanceMatrix& distances,
                             int neighbor_budget) {
  const std::size_t n = x.entries.rows();
  if (distances.entries.rows() != n) {
    throw std::invalid_argument("sparsify: distance matrix size does not match X");
  }
  if (neighbor_budget < 0 || neighbor_budget > static_cast<int>(n) - 1) {
    throw ValidationError("matrix.N_prime", "N' must lie in [0, N - 1]");
  }

  std::vector<std::vector<bool>> keep(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    keep[i][i] = true;
    if (neighbor_budget == 0) continue;
    std::vector<double> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(distances.entries(i, j));
    }
    std::nth_element(others.begin(), others.begin() + (neighbor_budget - 1), others.end());
    const double cutoff = others[static_cast<std::size_t>(neighbor_budget - 1)];
    const double slack = 1e-9 * cutoff;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && distances.entries(i, j) <= cutoff + slack) keep[i][j] = true;
    }
  }

  ConcentrationMatrix out = x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!keep[i][j] && !keep[j][i]) out.entries(i, j) = 0.0;
    }
  }
  out.neighbor_budget = neighbor_budget;
  return out;
}

IterationMatrix normalize(const ConcentrationMatrix& x, NormalizationMode mode) {
  const Matrix& m = x.entries;
  const std::size_t n = m.rows();
  const Vector sums = m.column_sums();
  for (std::size_t j = 0; j < n; ++j) {
    if (!(sums[j] > 0.0)) {
      throw ValidationError("matrix", "column " + std::to_string(j) + " of X has non-positive sum");
    }
  }

  IterationMatrix out;
  out.mode = mode;
  out.entries = m;
  if (mode == NormalizationMode::column_normalized) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.entries(i, j) = m(i, j) / sums[j];
  } else {
    const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
    if (*hi - *lo > 1e-9 * *hi) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "uniform_S requires equal column sums; columns " << (hi - sums.begin()) << " and "
          << (lo - sums.begin()) << " differ (" << *hi << " vs " << *lo << ")";
      throw ModeError(msg.str());
    }
    double s = 0.0;
    for (double v : sums) s += v;
    s /= static_cast<double>(n);
    out.entries = m;
    out.entries *= 1.0 / s;
  }

  out.column_sums = out.entries.column_sums();
  out.row_sums = out.entries.row_sums();
  out.doubly_stochastic = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out.column_sums[i] - 1.0) > 1e-9 || std::abs(out.row_sums[i] - 1.0) > 1e-9) {
      out.doubly_stochastic = false;
    }
  }
  return out;
}

std::vector<int> neighbor_counts(const Matrix& m) {
  std::vector<int> counts(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) ++counts[j];
  return counts;
}

Vector center_responses(const NetworkGeometry& geometry, double horizon, const Point& center,
                        const QuadratureOptions& options) {
  const MediumParams& medium = geometry.medium();
  const Point origin =
      center.empty() ? Point(static_cast<std::size_t>(medium.dimension), 0.0) : center;
  Vector responses(geometry.size());
  for (std::size_t j = 0; j < geometry.size(); ++j) {
    const double distance = std::max(geometry.distance_to(j, origin), medium.node_radius);
    responses[j] = cumulative_response(distance, horizon, medium, options).value;
  }
  return responses;
}

Vector uniform_rates(std::span<const double> estimates, double column_sum) {
  if (!(column_sum > 0.0)) throw DomainError("uniform_rates: S must be positive");
  Vector rates(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) rates[i] = estimates[i] / column_sum;
  return rates;
}

Vector compact_rates(std::span<const double> estimates, std::span<const double> center_response) {
  if (estimates.size() != center_response.size()) {
    throw std::invalid_argument("compact_rates: size mismatch");
  }
  const double n = static_cast<double>(estimates.size());
  Vector rates(estimates.size());
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    if (!(center_response[j] > 0.0)) {
      throw DomainError("compact_rates: X_" + std::to_string(j) + " must be positive");
    }
    rates[j] = estimates[j] / (center_response[j] * n);
  }
  return rates;
}

}  // namespace dbmc
