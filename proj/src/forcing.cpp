#include "thinfilm/forcing.hpp"

#include <cmath>
#include <string>

#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

// int_0^1 z f1(x,z,t) dz
double moment_integral(const ForcingSpec& spec, double x, double t) {
  const Quadrature01& rule = gauss_legendre01(spec.quad_order);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * rule.nodes[i] * spec.f1.eval(x, rule.nodes[i], t);
  }
  return s;
}

}  // namespace

ForcingSpec make_forcing_spec(Expr f1, std::optional<double> bound, double t_end,
                              int quad_order) {
  if (f1.empty()) throw ConfigError("forcing expression is empty");
  if (quad_order < 2) throw ConfigError("forcing quadrature order must be at least 2");
  ForcingSpec spec{std::move(f1), bound, quad_order};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      for (int k = 0; k <= 2; ++k) {
        const double x = i / 8.0;
        const double y = j / 8.0;
        const double t = t_end * k / 2.0;
        const double v = spec.f1.eval(x, y, t);
        if (!std::isfinite(v)) {
          throw ConfigError("forcing is not finite at (x=" + std::to_string(x) +
                            ", y=" + std::to_string(y) + ", t=" + std::to_string(t) + ")");
        }
        if (bound && std::abs(v) > *bound) {
          throw ConfigError("forcing exceeds its declared bound " + std::to_string(*bound) +
                            " at (x=" + std::to_string(x) + ", y=" + std::to_string(y) +
                            ", t=" + std::to_string(t) + "): " + std::to_string(v));
        }
      }
    }
  }
  return spec;
}

ForcingSpec zero_forcing() { return ForcingSpec{}; }

double eval_F(const ForcingSpec& spec, double x, double y, double t) {
  if (spec.f1.empty()) return 0.0;
  const Quadrature01& rule = gauss_legendre01(spec.quad_order);
  const double i1 = moment_integral(spec, x, t);
  // tail integral remapped onto the fixed rule: at y = 0 its samples coincide
  // with the moment integral's, so F(x,0,t) cancels to exactly zero, and the
  // (1-y)^2 prefactor kills y = 1 exactly as well
  double i2 = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    i2 += rule.weights[i] * s * spec.f1.eval(x, y + s * (1.0 - y), t);
  }
  return (y - 1.0) * i1 + (1.0 - y) * (1.0 - y) * i2;
}

double eval_F_dy(const ForcingSpec& spec, double x, double y, double t) {
  if (spec.f1.empty()) return 0.0;
  const Quadrature01& rule = gauss_legendre01(spec.quad_order);
  const double i1 = moment_integral(spec, x, t);
  double tail = 0.0;  // int_y^1 f1 dz, remapped
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    tail += rule.weights[i] * spec.f1.eval(x, y + s * (1.0 - y), t);
  }
  return i1 - (1.0 - y) * tail;
}

double eval_Phi(const ForcingSpec& spec, double x, double t) {
  if (spec.f1.empty()) return 0.0;
  const Quadrature01& rule = gauss_legendre01(spec.quad_order);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * eval_F(spec, x, rule.nodes[i], t);
  }
  return s;
}

GridField phi_field(const ForcingSpec& spec, PeriodicGrid grid, double t) {
  GridField phi(grid);
  if (spec.f1.empty()) return phi;
  for (int j = 0; j < grid.n; ++j) phi[j] = eval_Phi(spec, grid.node(j), t);
  return phi;
}

}  // namespace thinfilm
