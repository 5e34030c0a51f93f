#include "dbmc/special_functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dbmc/errors.hpp"

namespace {

using dbmc::special::erfc;
using dbmc::special::erfcx;
using dbmc::special::expint_e1;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Reference values from mpmath at 40 digits (tests/oracles/kernel_values.py).
TEST(SpecialFunctions, ErfcMatchesArbitraryPrecision) {
  struct Case { double x, expected; };
  const Case cases[] = {
      {0.0, 1.0},
      {0.001, 0.9988716212090307636200515},
      {0.5, 0.4795001221869534623172533},
      {1.0, 0.1572992070502851306587794},
      {2.0, 0.004677734981047265837930744},
      {3.5, 7.430983723414127455236838e-07},
      {6.0, 2.151973671249891311659335e-17},
      {10.0, 2.088487583762544757000786e-45},
      {26.0, 5.663192408856142846475728e-296},
  };
  for (const auto& c : cases) EXPECT_LT(rel(erfc(c.x), c.expected), 1e-13) << "x=" << c.x;
}

TEST(SpecialFunctions, E1MatchesArbitraryPrecision) {
  struct Case { double x, expected; };
  const Case cases[] = {
      {1e-10, 22.4486352651389239795709},
      {0.001, 6.331539364136149332002786},
      {0.25, 1.044282634443738194536438},
      {1.0, 0.2193839343955202736771638},
      {2.25, 0.0347620731194445970761786},
      {5.0, 0.001148295591275325797330562},
      {20.0, 9.835525290649881690396987e-11},
      {60.0, 1.435867565681256788442984e-28},
      {106.92666780189853, 3.382564263166128042417220595e-49},
      {187.15741818272042, 2.780077035555449977857243527e-84},
  };
  for (const auto& c : cases) EXPECT_LT(rel(expint_e1(c.x), c.expected), 1e-13) << "x=" << c.x;
}

TEST(SpecialFunctions, AgreesWithStandardLibraryOnRandomArguments) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = 25.0 * u(gen);
    EXPECT_LT(rel(erfc(x), std::erfc(x)), 1e-13) << "x=" << x;
    // libstdc++'s expint loses accuracy above about 100
    const double y = std::exp(std::log(1e-6) + u(gen) * std::log(80.0 / 1e-6));
    EXPECT_LT(rel(expint_e1(y), -std::expint(-y)), 1e-13) << "y=" << y;
  }
}

TEST(SpecialFunctions, ErfcSymmetryAndScaling) {
  for (double x : {0.1, 0.7, 1.9, 2.1, 4.0}) {
    EXPECT_NEAR(erfc(-x) + erfc(x), 2.0, 1e-15);
    EXPECT_LT(rel(erfcx(x), std::exp(x * x) * std::erfc(x)), 1e-13);
  }
  // erfcx(x) ~ 1/(x sqrt(pi)) for large x
  EXPECT_LT(rel(erfcx(1e6), 1.0 / (1e6 * std::sqrt(M_PI))), 1e-11);
}

TEST(SpecialFunctions, DomainErrors) {
  EXPECT_THROW(expint_e1(0.0), dbmc::DomainError);
  EXPECT_THROW(expint_e1(-1.0), dbmc::DomainError);
  EXPECT_THROW(erfcx(-0.5), dbmc::DomainError);
}

}  // namespace
