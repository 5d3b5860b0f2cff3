#pragma once

#include "thinfilm/forcing.hpp"

namespace thinfilm {

// Dimensionless model coefficients plus the force density. The mixed-
// derivative wall term is active exactly when chi() is true, and chi is
// derived from r alone: r == 3, no independent switch.
struct ModelParams {
  double beta = 12.0;   // bending coefficient, > 0
  double delta = 12.0;  // wall-viscosity coefficient, >= 0
  double r = 3.0;       // scaling exponent in [1, 3]
  double rho = 1.0;     // wall-inertia coefficient; only the residual harness
                        // and the scaling module read it

  ForcingSpec forcing;  // empty f1 means zero forcing

  double h_floor = 1e-8;     // height below which a step counts as failed
  double newton_tol = 1e-10; // inner fixed-point tolerance (chi branch)
  int max_inner_iters = 200;

  bool chi() const { return r == 3.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Checks ranges and cross-field constraints; returns the input unchanged on
// success so validation is idempotent by construction.
ModelParams validate_params(const ModelParams& raw);

}  // namespace thinfilm
