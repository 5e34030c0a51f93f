#include "dbmc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dbmc/errors.hpp"

namespace dbmc::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 5000;

// Below this the positive-term series for erf is used, above it the
// continued fraction for erfcx.
constexpr double kErfcSplit = 2.0;

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation.
double erf_series(double x) {
  double term = x;
  double sum = x;
  const double x2 = x * x;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < kEps * sum) break;
  }
  return 2.0 * std::numbers::inv_sqrtpi * std::exp(-x2) * sum;
}

// sqrt(pi) * erfcx(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz algorithm.
double erfcx_continued_fraction(double x) {
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) throw DomainError("erfcx: argument must be non-negative");
  if (x < kErfcSplit) return std::exp(x * x) * (1.0 - erf_series(x));
  return erfcx_continued_fraction(x);
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x < kErfcSplit) return 1.0 - erf_series(x);
  // exp(-x^2) underflows before the fraction loses accuracy.
  if (x > 27.3) return 0.0;
  return std::exp(-x * x) * erfcx_continued_fraction(x);
}

double expint_e1(double x) {
  if (std::isnan(x)) return x;
  if (!(x > 0.0)) throw DomainError("expint_e1: argument must be positive");
  if (x <= 1.0) {
    // -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < kMaxTerms; ++k) {
      term *= -x / k;
      const double contribution = term / k;
      sum += contribution;
      if (std::abs(contribution) < kEps * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
  }
  if (x > 740.0) return 0.0;
  // Continued fraction e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x);
}

}  // namespace dbmc::special
