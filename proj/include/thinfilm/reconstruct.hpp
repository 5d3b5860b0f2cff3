#pragma once

#include <optional>
#include <span>
#include <vector>

#include "thinfilm/forcing.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

// Scalar field on the tensor grid of the periodic x-nodes and a fixed set of
// y-nodes in [0,1]. Row j holds the vertical profile at x_j.
struct PlaneField {
  PeriodicGrid grid;
  std::vector<double> y;
  std::vector<double> v;  // row-major: v[j*q() + i] = value at (x_j, y_i)

  PlaneField() = default;
  PlaneField(PeriodicGrid g, std::span<const double> y_nodes)
      : grid(g),
        y(y_nodes.begin(), y_nodes.end()),
        v(static_cast<size_t>(g.n) * y_nodes.size(), 0.0) {}

  int n() const { return grid.n; }
  int q() const { return static_cast<int>(y.size()); }
  double& at(int j, int i) { return v[static_cast<size_t>(j) * y.size() + i]; }
  const double& at(int j, int i) const { return v[static_cast<size_t>(j) * y.size() + i]; }
};

// Limit fluid fields on the reference strip omega x (0,1). The pressure
// carries no y dependence, so a GridField is the honest storage; the
// vertical velocity is identically zero and is kept as a flag, not data.
struct LimitFields {
  GridField p;
  PlaneField v1;
  bool v2_is_zero = true;
};

// One member of the family of approximate solutions at film thickness eps:
// eta = eps * h, p_eps = p, v1_eps = eps^2 * v1, all nodewise products.
struct ApproxFSI {
  double eps = 0.0;
  GridField eta;
  GridField p_eps;
  PlaneField v1_eps;
  bool v2_is_zero = true;
};

// Horizontal velocity profile
//
//   v1(x, y) = (1/2) y (y-1) h(x)^2 p_x(x) + h(x)^2 F(x, y, t)
//
// sampled at the given y-nodes, with p_x from deriv_x and F from eval_F.
// Both terms vanish at y = 0 and y = 1, so the profile is no-slip at the
// walls for every h, p, and forcing.
PlaneField limit_velocity(const GridField& h, const GridField& p, const ForcingSpec& spec,
                          double t, std::span<const double> y_nodes);

// Residuals of the depth-averaged transport identities. `average` is the
// worst-node defect of
//
//   int_0^1 v1 dy = -(1/12) h^2 p_x + h^2 Phi
//
// with the left side integrated by quad_unit_interval, which requires the
// PlaneField's y-nodes to be the Gauss-Legendre nodes of its own order.
// `mass_flux` is present when dth is supplied and is the worst-node defect
// of dth + d/dx(h * vbar1) = 0; the flux h * vbar1 is dealiased exactly
// like the film equation's, so the residual measures reconstruction error
// rather than aliasing differences.
struct DepthAverageReport {
  double average = 0.0;
  std::optional<double> mass_flux;
};

DepthAverageReport depth_average_check(const PlaneField& v1, const GridField& h,
                                       const GridField& p, const GridField& phi,
                                       const GridField* dth = nullptr);

// Rescales one limit snapshot (h, p, v1) to finite thickness: eta = eps * h,
// p_eps = p, v1_eps = eps^2 * v1. Requires 0 < eps < 1 (open interval).
ApproxFSI fsi_family(const GridField& h, const GridField& p, const PlaneField& v1, double eps);

// Inverts the coupled pressure law p = beta h_xxxx - delta w_xx for the wall
// rate w, fixing the gauge by mean(w) = 0. Requires delta > 0; the r value in
// params is not consulted, so the caller decides whether the coupling is
// physically on.
GridField wall_rate_from_pressure(const GridField& h, const GridField& p, double beta,
                                  double delta);

}  // namespace thinfilm
