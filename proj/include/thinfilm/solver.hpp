#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "thinfilm/config.hpp"
#include "thinfilm/diagnostics.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/params.hpp"

namespace thinfilm {

struct FilmState {
  double t = 0.0;
  GridField h;
};

// p = beta h_xxxx - chi delta w_x x  with w = dt h. The two-argument form is
// for chi = 0 only and throws when the wall term is active.
GridField pressure_of(const GridField& h, const ModelParams& params);
GridField pressure_of(const GridField& h, const GridField& wdot, const ModelParams& params);

// G = h^3 ((1/12) p_x - Phi), dealiased, so that dt h = flux_divergence(G).
GridField flux_of(const GridField& h, const GridField& p, const GridField& phi);

// Solves (I + (delta/12) dx(h^3 dx^3 .)) w = rhs by matrix-free BiCGStab,
// right-preconditioned with the constant-coefficient Fourier symbol
// 1 + (delta/12) hbar^3 k^4, hbar^3 = mean of h^3. The product h^3 (dx^3 w)
// inside the operator is dealiased exactly like flux_of, so the solved w is
// consistent with the flux formulation. Result has exactly zero mean.
GridField implicit_wdot_solve(const GridField& h, const GridField& rhs, const ModelParams& params);

// sigma = -(beta/12) hbar^3 k^6 / (1 + chi (delta/12) hbar^3 k^4)
double dispersion_rate(double k, double hbar, const ModelParams& params);

// 0.1 * (12/(beta max h0^3)) * (n/2)^-6 * 10: one order above the explicit
// stability scale, affordable because the implicit shell carries the
// stiffness.
double default_dt0(const GridField& h0, const ModelParams& params);

// One-step integrator. Holds the BDF2 history; any dt change or rejection
// must call reset_history(), after which the next step bootstraps with
// backward Euler. Each accepted step stores its converged w = dt h.
class Stepper {
 public:
  Stepper(ModelParams params, Scheme scheme);

  // Advances state by dt. Throws PositivityViolation if the stepped height
  // dips to h_floor, NumericsError if the inner iteration diverges.
  FilmState step(const FilmState& state, double dt);

  void reset_history();

  // w of the last accepted step (also defined for a plain state via wdot_of).
  const GridField& last_w() const;

  // Instantaneous w = dt h for a given state: the chi=0 explicit right side,
  // or the chi=1 implicit solve.
  GridField wdot_of(const GridField& h, double t) const;

  // Phi sampled on the grid at time t (cached when time-independent).
  GridField phi_at(const PeriodicGrid& grid, double t) const;

  const ModelParams& params() const { return params_; }
  Scheme scheme() const { return scheme_; }

 private:
  ModelParams params_;
  Scheme scheme_;
  bool have_history_ = false;
  FilmState prev_;       // state before the last accepted step
  double prev_dt_ = 0.0;
  GridField last_w_;     // converged w of the last accepted step
  std::vector<std::complex<double>> prev_rhs_hat_;  // N(h^n, t^n) of that step
  mutable std::vector<std::pair<double, GridField>> phi_memo_;

  GridField rhs_explicit(const GridField& h, double t) const;
};

enum class RunStatus { Completed, Positivity, Unrecoverable };

struct Snapshot {
  FilmState state;
  GridField w;  // converged dt h at the snapshot time
};

struct Trajectory {
  std::vector<Snapshot> snapshots;          // cadence + first + last accepted
  std::vector<DiagnosticsRecord> records;   // one per accepted step (and t=0)
  RunStatus status = RunStatus::Completed;
  std::string failure_note;                 // empty on success
  double last_good_time = 0.0;
};

// Adaptive-dt driver: halves dt on positivity or inner-solve failure and
// retries, grows dt by 1.2x after 10 clean steps (capped at dt0), lands
// exactly on t_end. dt underflow below dt0 * 1e-8 ends the run: status
// Positivity when the blocking failure is a height collapse, Unrecoverable
// otherwise. Never throws for those two outcomes; the partial trajectory is
// always returned.
Trajectory run(const RunConfig& config);

}  // namespace thinfilm
