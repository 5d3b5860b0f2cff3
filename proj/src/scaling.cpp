#include "thinfilm/scaling.hpp"

#include <cmath>
#include <string>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be a positive finite number, got " +
                      std::to_string(value));
  }
}

void require_poisson(double nu) {
  if (!(nu > -1.0 && nu < 0.5)) {
    throw ConfigError("nu must lie in (-1, 0.5), got " + std::to_string(nu));
  }
}

}  // namespace

double bending_stiffness(double E, double b, double nu) {
  require_positive(E, "E");
  require_positive(b, "b");
  require_poisson(nu);
  return E * (b * b * b) / (12.0 * (1.0 - nu * nu));
}

double length_scale(double B, double eps, double V, double mu) {
  require_positive(B, "B");
  require_positive(eps, "eps");
  require_positive(V, "V");
  require_positive(mu, "mu");
  return std::sqrt(B * eps / (V * mu));
}

DimensionlessGroups dimensionless_numbers(const PhysicalParams& p) {
  require_positive(p.rho_f, "rho_f");
  require_positive(p.rho_s, "rho_s");
  require_positive(p.mu, "mu");
  require_positive(p.V, "V");
  require_positive(p.L, "L");
  require_positive(p.H, "H");
  require_positive(p.E, "E");
  require_positive(p.b, "b");
  require_poisson(p.nu);
  require_positive(p.D, "D");

  DimensionlessGroups g;
  g.eps = p.H / p.L;
  if (!(g.eps > 0.0 && g.eps < 1.0)) {
    throw ConfigError("eps = H/L must lie in (0, 1), got " + std::to_string(g.eps));
  }

  const double B = bending_stiffness(p.E, p.b, p.nu);
  g.Re = p.rho_f * p.V * p.L / p.mu;
  g.rho = p.rho_s * p.b * p.V / p.mu;
  g.delta = p.D / (p.mu * p.L);
  g.beta = B / (p.mu * p.V * p.L * p.L);

  // delta ~ eps^-r  =>  r = log(delta) / log(1/eps); log(1/eps) > 0 on (0,1)
  g.r_raw = std::log(g.delta) / std::log(1.0 / g.eps);
  g.r_fit = g.r_raw;
  if (g.r_fit < 1.0) {
    g.r_fit = 1.0;
    g.r_clamped = true;
  } else if (g.r_fit > 3.0) {
    g.r_fit = 3.0;
    g.r_clamped = true;
  }
  return g;
}

}  // namespace thinfilm
