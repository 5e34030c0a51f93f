#include "dbmc/concentration_matrix.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dbmc/errors.hpp"
#include "dbmc/spectral.hpp"

namespace {

using namespace dbmc;

const MediumParams kMedium{2, 1.0, 0.1};

ConcentrationMatrix from_entries(Matrix m) {
  ConcentrationMatrix x;
  x.entries = std::move(m);
  x.horizon = 1.0;
  x.medium = kMedium;
  return x;
}

NetworkGeometry random_geometry(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(gen), u(gen)});
  return NetworkGeometry(pts, kMedium);
}

TEST(BuildConcentrationMatrix, SingleNodeUsesNodeRadius) {
  const auto x = build_concentration_matrix(line_network(1, 1.0, kMedium), 1.0);
  ASSERT_EQ(x.entries.rows(), 1u);
  EXPECT_GT(x.entries(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(x.entries(0, 0), cumulative_response(0.1, 1.0, kMedium).value);
}

TEST(BuildConcentrationMatrix, EntriesAreKernelValues) {
  const auto g = line_network(3, 1.0, kMedium);
  const auto x = build_concentration_matrix(g, 1.0);
  EXPECT_LT(x.entries(0, 2), x.entries(0, 1));
  EXPECT_LT(std::abs(x.entries(0, 1) - closed_form_response(1.0, 1.0, kMedium).value),
            1e-10 * x.entries(0, 1));
  EXPECT_LT(std::abs(x.entries(0, 2) - closed_form_response(2.0, 1.0, kMedium).value),
            1e-10 * x.entries(0, 2));
}

TEST(BuildConcentrationMatrix, ExactlySymmetricAndPositive) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = build_concentration_matrix(random_geometry(gen, 7), 1.5).entries;
    EXPECT_EQ(x.max_asymmetry(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      EXPECT_GT(x(i, i), 0.0);
      for (std::size_t j = 0; j < x.cols(); ++j) EXPECT_GE(x(i, j), 0.0);
    }
  }
}

TEST(BuildConcentrationMatrix, PermutationEquivariance) {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = random_geometry(gen, 6);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Point> permuted(6);
    for (std::size_t i = 0; i < 6; ++i) permuted[i] = g.position(perm[i]);
    const auto x = build_concentration_matrix(g, 1.0).entries;
    const auto y = build_concentration_matrix(NetworkGeometry(permuted, kMedium), 1.0).entries;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(y(i, j), x(perm[i], perm[j]));
  }
}

TEST(Sparsify, FullBudgetLeavesMatrixUnchanged) {
  const auto g = line_network(8, 1.0, kMedium);
  const auto x = build_concentration_matrix(g, 1.0);
  const auto s = sparsify(x, distance_matrix(g), 7);
  EXPECT_EQ(s.entries, x.entries);
  EXPECT_EQ(s.neighbor_budget, 7);
}

TEST(Sparsify, LineBudgetTwoIsBanded) {
  const auto g = line_network(10, 1.0, kMedium);
  const auto s = sparsify(build_concentration_matrix(g, 1.0), distance_matrix(g), 2).entries;
  // End nodes keep their two nearest on one side; interior nodes keep the
  // adjacent pair. Keep-if-either widens the band to two at the ends only.
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > 2) EXPECT_EQ(s(i, j), 0.0) << i << "," << j;
      if (gap <= 1) EXPECT_GT(s(i, j), 0.0) << i << "," << j;
    }
  }
  EXPECT_GT(s(0, 2), 0.0);
  EXPECT_EQ(s(4, 6), 0.0);
  EXPECT_EQ(s.max_asymmetry(), 0.0);
}

TEST(Sparsify, ZeroBudgetLeavesDiagonal) {
  const auto g = line_network(4, 1.0, kMedium);
  const auto x = build_concentration_matrix(g, 1.0);
  const auto s = sparsify(x, distance_matrix(g), 0).entries;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(s(i, j), i == j ? x.entries(i, i) : 0.0);
}

TEST(Sparsify, RejectsBudgetOutOfRange) {
  const auto g = line_network(4, 1.0, kMedium);
  const auto x = build_concentration_matrix(g, 1.0);
  EXPECT_THROW(sparsify(x, distance_matrix(g), 4), ValidationError);
  EXPECT_THROW(sparsify(x, distance_matrix(g), -1), ValidationError);
}

TEST(Sparsify, WrappedLineKeepsTiesSymmetrically) {
  const auto g = wrapped_line_network(24, 1.0, kMedium);
  const auto s = sparsify(build_concentration_matrix(g, 1.0), distance_matrix(g), 5).entries;
  const auto counts = neighbor_counts(s);
  for (int c : counts) EXPECT_EQ(c, 6);  // +/-1, +/-2, +/-3: the 5th nearest ties with the 6th
  const auto sums = s.column_sums();
  for (double v : sums) EXPECT_NEAR(v, sums[0], 1e-12 * sums[0]);
}

TEST(Normalize, SingleNode) {
  const auto it = normalize(from_entries(Matrix(1, 1, 3.5)), NormalizationMode::uniform_S);
  EXPECT_EQ(it.entries(0, 0), 1.0);
  EXPECT_TRUE(it.doubly_stochastic);
}

TEST(Normalize, TwoNodeSymmetric) {
  const double p = 0.7, q = 0.2;
  Matrix x(2, 2);
  x(0, 0) = x(1, 1) = p;
  x(0, 1) = x(1, 0) = q;
  for (auto mode : {NormalizationMode::uniform_S, NormalizationMode::column_normalized}) {
    const auto it = normalize(from_entries(x), mode);
    EXPECT_NEAR(it.entries(0, 0), p / (p + q), 1e-15);
    EXPECT_NEAR(it.entries(0, 1), q / (p + q), 1e-15);
    EXPECT_TRUE(it.doubly_stochastic);
    const auto spec = eigendecompose_symmetric(it.entries);
    EXPECT_NEAR(spec.eigenvalues[0], 1.0, 1e-15);
    EXPECT_NEAR(spec.eigenvalues[1], (p - q) / (p + q), 1e-14);
  }
}

TEST(Normalize, ColumnsSumToOneOnRandomGeometries) {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 10; ++trial) {
    const auto it = normalize(build_concentration_matrix(random_geometry(gen, 8), 1.0),
                              NormalizationMode::column_normalized);
    for (double s : it.entries.column_sums()) EXPECT_NEAR(s, 1.0, 1e-12);
    for (double v : it.entries.data()) EXPECT_GE(v, 0.0);
  }
}

TEST(Normalize, LineBoundaryIsNotDoublyStochastic) {
  const auto g = line_network(20, 1.0, kMedium);
  const auto x = sparsify(build_concentration_matrix(g, 1.0), distance_matrix(g), 5);
  const auto it = normalize(x, NormalizationMode::column_normalized);
  EXPECT_FALSE(it.doubly_stochastic);
  EXPECT_THROW(normalize(x, NormalizationMode::uniform_S), ModeError);
}

TEST(Normalize, UniformSOnWrappedLineIsSymmetricDoublyStochastic) {
  for (int budget : {2, 5, 23}) {
    const auto g = wrapped_line_network(24, 1.0, kMedium);
    const auto x = sparsify(build_concentration_matrix(g, 1.0), distance_matrix(g), budget);
    const auto it = normalize(x, NormalizationMode::uniform_S);
    EXPECT_TRUE(it.doubly_stochastic);
    EXPECT_LT(it.entries.max_asymmetry(), 1e-15);
    for (double s : it.entries.row_sums()) EXPECT_NEAR(s, 1.0, 1e-10);
    for (double s : it.entries.column_sums()) EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(Normalize, RejectsEmptyColumn) {
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  EXPECT_THROW(normalize(from_entries(x), NormalizationMode::column_normalized), ValidationError);
}

TEST(NormalizationMode, ParseAndPrint) {
  EXPECT_EQ(parse_normalization_mode("uniform_S"), NormalizationMode::uniform_S);
  EXPECT_EQ(to_string(NormalizationMode::column_normalized), "column_normalized");
  EXPECT_THROW(parse_normalization_mode("rows"), ValidationError);
}

TEST(Rates, UniformAndCompact) {
  const std::vector<double> zero(3, 0.0);
  for (double f : uniform_rates(zero, 2.0)) EXPECT_EQ(f, 0.0);

  const double x0 = 0.4;
  const std::vector<double> rho{1, 2, 3};
  const std::vector<double> xj(3, x0);
  const auto f = compact_rates(rho, xj);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f[i], rho[i] / (3 * x0));

  const std::vector<double> doubled{2, 4, 6};
  const auto f2 = compact_rates(doubled, xj);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f2[i], 2 * f[i]);
  const auto u = uniform_rates(rho, 4.0);
  EXPECT_DOUBLE_EQ(u[2], 0.75);

  EXPECT_THROW(uniform_rates(rho, 0.0), DomainError);
  EXPECT_THROW(compact_rates(rho, std::vector<double>{1.0, 0.0, 1.0}), DomainError);
}

TEST(CenterResponses, ClampedToNodeRadius) {
  const auto g = NetworkGeometry({{0.0, 0.0}, {0.5, 0.0}}, kMedium);
  const auto xj = center_responses(g, 1.0);
  EXPECT_DOUBLE_EQ(xj[0], cumulative_response(0.1, 1.0, kMedium).value);
  EXPECT_DOUBLE_EQ(xj[1], cumulative_response(0.5, 1.0, kMedium).value);
}

}  // namespace
