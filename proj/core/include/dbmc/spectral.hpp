#pragma once

#include "dbmc/matrix.hpp"

namespace dbmc {

struct SpectralSummary {
  // Sorted by descending |lambda|, ties broken by descending signed value.
  Vector eigenvalues;
  // Orthonormal eigenvectors as columns, in eigenvalue order. Each column is
  // signed so that its largest-magnitude component (first on ties) is
  // positive.
  Matrix eigenvectors;
  double lambda2 = 0.0;  // 0 for a single node
  double spectral_gap = 1.0;  // 1 - |lambda2|
  Vector consensus_vector;  // first column of `eigenvectors`
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver for symmetric matrices. The input is
// symmetrized as (M + M^T)/2 after checking max |M - M^T| <= symmetry_tolerance
// (ModeError otherwise). Throws ConvergenceError after 100 sweeps.
SpectralSummary eigendecompose_symmetric(const Matrix& m, double symmetry_tolerance = 1e-9);

struct PowerResult {
  double value = 0.0;  // |lambda2|
  int iterations = 0;
  double residual = 0.0;  // ||M x - s |lambda2| x||_inf at the final iterate
};

// |lambda2| by power iteration restricted to the sum-zero subspace. That
// subspace is invariant whenever every column of M sums to one, which holds
// for both normalization modes; on it the dominant eigenvalue is lambda2.
// Each step applies M twice so that +/-lambda pairs do not stall the
// estimate. Throws ConvergenceError (carrying the last two estimates) if the
// relative change is still above `tolerance` after max_iterations steps.
PowerResult lambda2_power(const Matrix& m, double tolerance = 1e-12, int max_iterations = 100000);

struct MarkovStructure {
  bool aperiodic = false;    // some diagonal entry is positive (sufficient)
  bool irreducible = false;  // support graph strongly connected
};

MarkovStructure markov_structure_check(const Matrix& m);

struct CovariancePrediction {
  Matrix full;            // sigma0^2 X^{2n}
  Vector diagonal;        // Cov_ii(n)
  Vector lambda2_approx;  // sigma0^2 (1/N + v2_i^2 lambda2^{2n})
  double bound = 0.0;     // sigma0^2 (1/N + lambda2^{2n})
  unsigned epoch = 0;
  double sigma0_sq = 0.0;
};

// Covariance of the estimates after n epochs when the initial estimates are
// independent with variance sigma0_sq. Needs symmetric X (ModeError
// otherwise). `spectrum` may be passed to reuse a decomposition. When
// lambda2 is degenerate, v2 is whichever eigenvector the solver returned.
CovariancePrediction predict_covariance(const Matrix& x, unsigned n, double sigma0_sq,
                                        const SpectralSummary* spectrum = nullptr);

// X^n diag(cov0) (X^n)^T for any square X, including column-normalized
// boundary matrices.
Matrix propagate_covariance(const Matrix& x, unsigned n, std::span<const double> cov0_diagonal);

// Sum over columns of the population variance of the N entries of X^n.
double matrix_power_column_variance(const Matrix& x, unsigned n);

// The same metric for n = 0 .. max_n, by successive multiplication.
Vector column_variance_series(const Matrix& x, unsigned max_n);

}  // namespace dbmc
