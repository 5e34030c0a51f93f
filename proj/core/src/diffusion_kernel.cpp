#include "dbmc/diffusion_kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dbmc/errors.hpp"
#include "dbmc/special_functions.hpp"

namespace dbmc {
namespace {

void check_response_args(double distance, double horizon, const MediumParams& medium) {
  medium.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("cumulative response: horizon T0 must be positive and finite");
  }
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw DomainError("cumulative response: distance must be non-negative and finite");
  }
  if (distance == 0.0 && medium.dimension >= 2) {
    std::ostringstream msg;
    msg << "cumulative response diverges at zero distance for m = " << medium.dimension
        << "; clamp self-distance to node_radius";
    throw DivergenceError(msg.str());
  }
}

}  // namespace

void MediumParams::validate() const {
  if (dimension < 1 || dimension > 3) {
    throw ValidationError("medium.m", "dimension must be 1, 2 or 3");
  }
  if (!(diffusion_coefficient > 0.0) || !std::isfinite(diffusion_coefficient)) {
    throw ValidationError("medium.D", "diffusion coefficient must be positive");
  }
  if (!(node_radius > 0.0) || !std::isfinite(node_radius)) {
    throw ValidationError("medium.node_radius", "node radius must be positive");
  }
}

KernelEval green_eval(double distance, double t, const MediumParams& medium) {
  medium.validate();
  if (!(t > 0.0)) throw DomainError("green_eval: t must be positive");
  if (!(distance >= 0.0)) throw DomainError("green_eval: distance must be non-negative");
  const double four_dt = 4.0 * medium.diffusion_coefficient * t;
  const double norm = std::pow(std::numbers::pi * four_dt, -0.5 * medium.dimension);
  return KernelEval{norm * std::exp(-distance * distance / four_dt), 0.0};
}

KernelEval cumulative_response(double distance, double horizon,
                               const MediumParams& medium,
                               const QuadratureOptions& options) {
  check_response_args(distance, horizon, medium);

  const double d = medium.diffusion_coefficient;
  const double x2 = distance * distance;
  const double half_m = 0.5 * medium.dimension;
  const double norm = std::pow(4.0 * std::numbers::pi * d, -half_m);

  // s = u^2, ds = 2u du: integrand 2 u^{1-m} (4 pi D)^{-m/2} exp(-x^2/(4 D u^2)).
  auto integrand = [&](double u) {
    const double u2 = u * u;
    return 2.0 * norm * std::pow(u, 1.0 - medium.dimension) * std::exp(-x2 / (4.0 * d * u2));
  };
  const QuadratureResult r = integrate_adaptive(integrand, 0.0, std::sqrt(horizon), options);
  return KernelEval{r.value, r.estimated_error};
}

KernelEval closed_form_response(double distance, double horizon,
                                const MediumParams& medium) {
  check_response_args(distance, horizon, medium);

  const double d = medium.diffusion_coefficient;
  const double x = distance;
  const double z = x / (2.0 * std::sqrt(d * horizon));
  double value = 0.0;
  switch (medium.dimension) {
    case 1: {
      // e^{-z^2} [ sqrt(T0/(pi D)) - x/(2D) erfcx(z) ]
      const double bracket = std::sqrt(horizon / (std::numbers::pi * d)) -
                             x / (2.0 * d) * special::erfcx(z);
      value = std::exp(-z * z) * bracket;
      break;
    }
    case 2:
      value = special::expint_e1(z * z) / (4.0 * std::numbers::pi * d);
      break;
    default:
      value = special::erfc(z) / (4.0 * std::numbers::pi * d * x);
      break;
  }
  return KernelEval{value, 16.0 * std::numeric_limits<double>::epsilon() * std::abs(value)};
}

}  // namespace dbmc
