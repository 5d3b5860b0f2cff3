#include "thinfilm/diagnostics.hpp"

#include <cmath>
#include <string>

#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

double mass(const GridField& h) { return mean_integral(h); }

double min_height(const GridField& h) { return min_value(h); }

double lyapunov(const GridField& h, const ModelParams& params) {
  GridField inv(h.grid);
  for (int j = 0; j < h.n(); ++j) {
    if (!(h[j] > 0.0)) {
      throw NumericsError("lyapunov needs h > 0, got " + std::to_string(h[j]) + " at node " +
                          std::to_string(j));
    }
    inv[j] = 6.0 / h[j];
  }
  double value = mean_integral(inv);
  if (params.chi()) {
    const GridField hxx = deriv_x(h, 2);
    value += 0.5 * params.delta * mean_integral(hadamard(hxx, hxx));
  }
  return value;
}

double energy(const GridField& h, const ModelParams& params) {
  const GridField hxx = deriv_x(h, 2);
  return 0.5 * params.beta * mean_integral(hadamard(hxx, hxx));
}

double dissipation(const GridField& h, const ModelParams& params) {
  const GridField hxxx = deriv_x(h, 3);
  return params.beta * mean_integral(hadamard(hxxx, hxxx));
}

double forcing_power(const GridField& h, const GridField& phi) {
  return 12.0 * mean_integral(hadamard(phi, deriv_x(h, 1)));
}

DiagnosticsRecord make_record(double t, double dt, const GridField& h, const GridField& w,
                              const GridField& p, const GridField& phi, const ModelParams& params) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.dt = dt;
  rec.mass = mass(h);
  rec.min_h = min_height(h);
  rec.lyapunov = lyapunov(h, params);
  rec.energy = energy(h, params);
  rec.dissipation = dissipation(h, params);
  rec.forcing_power = forcing_power(h, phi);

  if (params.chi()) {
    const GridField wx = deriv_x(w, 1);
    rec.wall_dissipation = params.delta * mean_integral(hadamard(wx, wx));
  }
  const GridField px = deriv_x(p, 1);
  const GridField h3 = hadamard(h, hadamard(h, h));
  rec.pressure_dissipation = mean_integral(hadamard(h3, hadamard(px, px))) / 12.0;
  rec.pressure_power = mean_integral(hadamard(h3, hadamard(phi, px)));
  return rec;
}

namespace {

void require_uniform_window(std::span<const DiagnosticsRecord> window) {
  if (window.size() != 3) {
    throw NumericsError("balance residual needs exactly 3 records, got " +
                        std::to_string(window.size()));
  }
  const double d1 = window[1].t - window[0].t;
  const double d2 = window[2].t - window[1].t;
  if (!(d1 > 0.0) || !(d2 > 0.0) || std::abs(d1 - d2) > 1e-9 * std::max(d1, d2)) {
    throw NumericsError("balance residual needs a uniformly spaced window");
  }
}

}  // namespace

double entropy_balance_residual(std::span<const DiagnosticsRecord> window) {
  require_uniform_window(window);
  const double dLdt = (window[2].lyapunov - window[0].lyapunov) / (window[2].t - window[0].t);
  return std::abs(dLdt + window[1].dissipation - window[1].forcing_power);
}

double energy_balance_residual(std::span<const DiagnosticsRecord> window) {
  require_uniform_window(window);
  const double dEdt = (window[2].energy - window[0].energy) / (window[2].t - window[0].t);
  return std::abs(dEdt + window[1].wall_dissipation + window[1].pressure_dissipation -
                  window[1].pressure_power);
}

}  // namespace thinfilm
