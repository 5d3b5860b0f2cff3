#include "thinfilm/reconstruct.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

PlaneField limit_velocity(const GridField& h, const GridField& p, const ForcingSpec& spec,
                          double t, std::span<const double> y_nodes) {
  if (!(h.grid == p.grid)) throw NumericsError("grid mismatch in limit_velocity");
  const GridField dxp = deriv_x(p, 1);
  PlaneField out(h.grid, y_nodes);
  const int q = out.q();
  for (int j = 0; j < h.n(); ++j) {
    const double h2 = h[j] * h[j];
    const double x = h.grid.node(j);
    for (int i = 0; i < q; ++i) {
      const double y = out.y[static_cast<size_t>(i)];
      out.at(j, i) = 0.5 * y * (y - 1.0) * h2 * dxp[j] + h2 * eval_F(spec, x, y, t);
    }
  }
  return out;
}

DepthAverageReport depth_average_check(const PlaneField& v1, const GridField& h,
                                       const GridField& p, const GridField& phi,
                                       const GridField* dth) {
  if (!(v1.grid == h.grid) || !(h.grid == p.grid) || !(h.grid == phi.grid)) {
    throw NumericsError("grid mismatch in depth_average_check");
  }
  // quad_unit_interval pairs samples with the Gauss-Legendre weights of the
  // sample count, so any other y sampling would integrate silently wrong
  const Quadrature01& rule = gauss_legendre01(v1.q());
  if (v1.y != rule.nodes) {
    throw NumericsError("depth average needs the velocity sampled at Gauss-Legendre y-nodes");
  }

  const GridField dxp = deriv_x(p, 1);
  GridField vbar(h.grid);
  DepthAverageReport report;
  for (int j = 0; j < h.n(); ++j) {
    const size_t row = static_cast<size_t>(j) * v1.y.size();
    vbar[j] = quad_unit_interval({v1.v.data() + row, v1.y.size()});
    const double h2 = h[j] * h[j];
    const double rhs = -(1.0 / 12.0) * h2 * dxp[j] + h2 * phi[j];
    report.average = std::max(report.average, std::abs(vbar[j] - rhs));
  }

  if (dth != nullptr) {
    if (!(dth->grid == h.grid)) throw NumericsError("grid mismatch in depth_average_check");
    const GridField div = flux_divergence(dealias_two_thirds(hadamard(h, vbar)));
    double worst = 0.0;
    for (int j = 0; j < h.n(); ++j) worst = std::max(worst, std::abs((*dth)[j] + div[j]));
    report.mass_flux = worst;
  }
  return report;
}

ApproxFSI fsi_family(const GridField& h, const GridField& p, const PlaneField& v1, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw ConfigError("eps must lie in the open interval (0, 1)");
  }
  if (!(h.grid == p.grid) || !(h.grid == v1.grid)) {
    throw NumericsError("grid mismatch in fsi_family");
  }
  ApproxFSI out;
  out.eps = eps;
  out.eta = eps * h;
  out.p_eps = p;
  out.v1_eps = v1;
  const double eps2 = eps * eps;
  for (double& value : out.v1_eps.v) value *= eps2;
  return out;
}

GridField wall_rate_from_pressure(const GridField& h, const GridField& p, double beta,
                                  double delta) {
  if (!(delta > 0.0)) throw ConfigError("wall rate recovery needs delta > 0");
  if (!(h.grid == p.grid)) throw NumericsError("grid mismatch in wall_rate_from_pressure");
  const GridField wxx = (1.0 / delta) * (beta * deriv_x(h, 4) - p);
  std::vector<std::complex<double>> bins = forward_spectrum(wxx);
  bins[0] = 0.0;  // gauge: mean(w) = 0
  for (size_t m = 1; m < bins.size(); ++m) {
    const double k = 2.0 * std::numbers::pi * static_cast<double>(m);
    bins[m] /= -(k * k);
  }
  return inverse_spectrum(bins, h.grid);
}

}  // namespace thinfilm
