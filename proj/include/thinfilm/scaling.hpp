#pragma once

namespace thinfilm {

// Physical device parameters in SI units. Everything except nu must be
// strictly positive; nu lies in (-1, 0.5); H/L must land in (0, 1).
struct PhysicalParams {
  double rho_f = 0.0;  // fluid density, kg/m^3
  double rho_s = 0.0;  // structure density, kg/m^3
  double mu = 0.0;     // fluid viscosity, Pa s
  double V = 0.0;      // velocity scale, m/s
  double L = 0.0;      // channel length, m
  double H = 0.0;      // nominal channel height, m
  double E = 0.0;      // Young modulus, Pa
  double b = 0.0;      // wall thickness, m
  double nu = 0.0;     // Poisson ratio
  double D = 0.0;      // wall viscosity coefficient, Pa s m
};

// Dimensionless groups under the scales T = L/V, P = mu V/L, F = P/L.
struct DimensionlessGroups {
  double Re = 0.0;     // rho_f V L / mu
  double rho = 0.0;    // rho_s b V / mu
  double delta = 0.0;  // D / (mu L)
  double beta = 0.0;   // B / (mu V L^2)
  double eps = 0.0;    // H / L
  double r_raw = 0.0;  // log(delta) / log(1/eps), unclamped
  double r_fit = 0.0;  // r_raw clamped to [1, 3]
  bool r_clamped = false;
};

// B = E b^3 / (12 (1 - nu^2)), Pa m^3.
double bending_stiffness(double E, double b, double nu);

// L = sqrt(B eps / (V mu)): the length at which an O(1) fluid pressure
// balances bending, i.e. beta recomputed at this L satisfies beta * eps = 1.
double length_scale(double B, double eps, double V, double mu);

// All groups at once; r is a fitted exponent (delta ~ eps^-r), clamped to
// [1, 3] with r_clamped raised so callers can warn instead of trusting it.
DimensionlessGroups dimensionless_numbers(const PhysicalParams& p);

}  // namespace thinfilm
