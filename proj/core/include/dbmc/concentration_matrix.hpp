#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "dbmc/diffusion_kernel.hpp"
#include "dbmc/matrix.hpp"
#include "dbmc/network.hpp"

namespace dbmc {

// X(i, j): concentration at node i at time T0 per unit constant production
// rate at node j over [0, T0]. Symmetric, non-negative, positive diagonal.
struct ConcentrationMatrix {
  Matrix entries;
  double horizon = 0.0;  // T0
  MediumParams medium;
  std::optional<int> neighbor_budget;  // N' when sparsified
};

enum class NormalizationMode { column_normalized, uniform_S };

std::string_view to_string(NormalizationMode mode);
// Throws ValidationError("matrix.normalization") for unknown names.
NormalizationMode parse_normalization_mode(std::string_view name);

// Row-stochastic-or-not iteration matrix; columns always sum to one.
struct IterationMatrix {
  Matrix entries;
  NormalizationMode mode = NormalizationMode::column_normalized;
  Vector column_sums;
  Vector row_sums;
  bool doubly_stochastic = false;  // all row and column sums within 1e-9 of 1
};

// X(i, j) = cumulative_response(max(x_ij, node_radius), T0). Only the upper
// triangle is evaluated; the lower one is mirrored, so X is exactly
// symmetric. Responses are memoized by distance.
ConcentrationMatrix build_concentration_matrix(const NetworkGeometry& geometry, double horizon,
                                               const QuadratureOptions& options = {});

// Keeps, for each node, the neighbours no farther than its N'-th nearest
// one (ties at the cut-off distance are all kept, relative tolerance 1e-9),
// then keeps an entry if either endpoint kept it. The diagonal is always
// kept. N' = 0 leaves only the diagonal.
ConcentrationMatrix sparsify(const ConcentrationMatrix& x, const DistanceMatrix& distances,
                             int neighbor_budget);

// column_normalized: each column divided by its own sum.
// uniform_S: whole matrix divided by the common column sum S; throws
// ModeError naming the worst pair unless all column sums agree within 1e-9
// relative. Throws ValidationError if any column sum is not positive.
IterationMatrix normalize(const ConcentrationMatrix& x, NormalizationMode mode);

// Number of non-zero off-diagonal entries per column.
std::vector<int> neighbor_counts(const Matrix& m);

// X_j of the compact-network case: response at `center` from node j, with
// the distance clamped to node_radius.
Vector center_responses(const NetworkGeometry& geometry, double horizon,
                        const Point& center = {},
                        const QuadratureOptions& options = {});

// F_i = rho_i / S.
Vector uniform_rates(std::span<const double> estimates, double column_sum);

// F_j = rho_j / (X_j N).
Vector compact_rates(std::span<const double> estimates, std::span<const double> center_response);

}  // namespace dbmc
