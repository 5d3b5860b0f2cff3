#pragma once

#include <optional>

#include "thinfilm/expr.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

// Horizontal force density f1(x, y, t) on the reference strip omega x (0,1),
// together with the derived vertical profile F and potential Phi:
//
//   F(x,y,t)  = (y-1) int_0^1 z f1(x,z,t) dz - int_y^1 (y-z) f1(x,z,t) dz
//   Phi(x,t)  = int_0^1 F(x,y,t) dy
//
// F vanishes at y = 0 and y = 1 by construction, and a constant f1 = c gives
// F = c y(y-1)/2, Phi = -c/12.
struct ForcingSpec {
  Expr f1;
  std::optional<double> bound;  // declared sup-norm bound, checked on a lattice
  int quad_order = 16;

  friend bool operator==(const ForcingSpec&, const ForcingSpec&) = default;
};

// Validates finiteness (and the declared bound, if any) of f1 on a sample
// lattice covering omega x [0,1] x [0, t_end].
ForcingSpec make_forcing_spec(Expr f1, std::optional<double> bound, double t_end,
                              int quad_order = 16);

// Zero forcing: F = Phi = 0.
ForcingSpec zero_forcing();

double eval_F(const ForcingSpec& spec, double x, double y, double t);

// dF/dy, needed wherever vertical shear of the reconstructed velocity enters.
double eval_F_dy(const ForcingSpec& spec, double x, double y, double t);

double eval_Phi(const ForcingSpec& spec, double x, double t);

// Phi sampled at the grid nodes. Skips evaluation entirely for zero forcing.
GridField phi_field(const ForcingSpec& spec, PeriodicGrid grid, double t);

}  // namespace thinfilm
