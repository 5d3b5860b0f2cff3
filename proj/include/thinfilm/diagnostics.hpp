#pragma once

#include <span>

#include "thinfilm/grid.hpp"
#include "thinfilm/params.hpp"

namespace thinfilm {

// Structural monitors evaluated once per accepted step. The balance
// residuals below consume windows of these records; the series CSV exports
// the first seven value columns.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double min_h = 0.0;
  double lyapunov = 0.0;       // int 6/h + chi (delta/2) int (h_xx)^2
  double energy = 0.0;         // (beta/2) int (h_xx)^2
  double dissipation = 0.0;    // beta int (h_xxx)^2
  double forcing_power = 0.0;  // 12 int Phi h_x

  // terms of the energy balance, evaluated with the step's converged w
  double wall_dissipation = 0.0;      // chi delta int (w_x)^2
  double pressure_dissipation = 0.0;  // (1/12) int h^3 (p_x)^2
  double pressure_power = 0.0;        // int h^3 Phi p_x
};

double mass(const GridField& h);
double min_height(const GridField& h);

// L = int 6/h + chi (delta/2) int (h_xx)^2; rejects nonpositive h.
double lyapunov(const GridField& h, const ModelParams& params);

double energy(const GridField& h, const ModelParams& params);
double dissipation(const GridField& h, const ModelParams& params);
double forcing_power(const GridField& h, const GridField& phi);

DiagnosticsRecord make_record(double t, double dt, const GridField& h, const GridField& w,
                              const GridField& p, const GridField& phi, const ModelParams& params);

// |dL/dt + dissipation - forcing_power| at the middle of a 3-record window
// with uniform spacing (central difference in t).
double entropy_balance_residual(std::span<const DiagnosticsRecord> window);

// |dE/dt + wall_dissipation + pressure_dissipation - pressure_power| at the
// middle record, same windowing rules.
double energy_balance_residual(std::span<const DiagnosticsRecord> window);

}  // namespace thinfilm
