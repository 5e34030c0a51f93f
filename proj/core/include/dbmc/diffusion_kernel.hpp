#pragma once

#include "dbmc/quadrature.hpp"

namespace dbmc {

// Physical constants of the free diffusive medium. Quantities are plain
// reals; the usual convention is lengths in units of the node spacing a and
// times in units of a^2 / D.
struct MediumParams {
  int dimension = 2;                  // m, one of 1, 2, 3
  double diffusion_coefficient = 1.0;  // D > 0
  double node_radius = 0.0;            // self-sensing distance, > 0

  // Throws ValidationError with paths "medium.m", "medium.D",
  // "medium.node_radius".
  void validate() const;
};

struct KernelEval {
  double value = 0.0;
  double estimated_error = 0.0;
};

// Green's function of the diffusion equation (impulse response):
// (4 pi D t)^{-m/2} exp(-distance^2 / (4 D t)). Throws DomainError if t <= 0.
KernelEval green_eval(double distance, double t, const MediumParams& medium);

// Concentration at `distance` after `horizon` time units of unit-rate
// constant production, integral_0^T0 g(distance, s) ds, by adaptive
// quadrature. Uses s = u^2 so the m = 1, distance = 0 endpoint singularity
// becomes a constant integrand.
//
// Throws DivergenceError for distance == 0 with m >= 2, DomainError for
// horizon <= 0 or negative distance, ConvergenceError from the integrator.
KernelEval cumulative_response(double distance, double horizon,
                               const MediumParams& medium,
                               const QuadratureOptions& options = {});

// Same quantity from the classical closed forms:
//   m = 1: sqrt(T0/(pi D)) e^{-z^2} - x/(2D) erfc(z),  z = x / (2 sqrt(D T0))
//   m = 2: E1(x^2 / (4 D T0)) / (4 pi D)
//   m = 3: erfc(z) / (4 pi D x)
// estimated_error is a rounding-level bound.
KernelEval closed_form_response(double distance, double horizon,
                                const MediumParams& medium);

}  // namespace dbmc
