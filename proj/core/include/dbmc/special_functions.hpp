#pragma once

// Double-precision special functions used by the closed-form channel
// responses. They are evaluated from series and continued fractions only, so
// the closed-form path shares no code with the quadrature path.

namespace dbmc::special {

// Complementary error function, any real x.
double erfc(double x);

// Scaled complementary error function exp(x^2) * erfc(x), x >= 0.
double erfcx(double x);

// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
double expint_e1(double x);

}  // namespace dbmc::special
