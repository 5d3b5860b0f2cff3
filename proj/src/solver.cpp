#include "thinfilm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

using Spectrum = std::vector<std::complex<double>>;

GridField cube(const GridField& h) {
  GridField out(h.grid);
  for (int j = 0; j < h.n(); ++j) out[j] = h[j] * h[j] * h[j];
  return out;
}

double max_cube(const GridField& h) {
  double m = 0.0;
  for (int j = 0; j < h.n(); ++j) m = std::max(m, h[j] * h[j] * h[j]);
  return m;
}

double wavenumber(int m) { return 2.0 * std::numbers::pi * m; }

double norm2(const GridField& f) {
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j) s += f[j] * f[j];
  return std::sqrt(s);
}

double dot(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (int j = 0; j < a.n(); ++j) s += a[j] * b[j];
  return s;
}

double max_abs(const GridField& f) {
  double m = 0.0;
  for (int j = 0; j < f.n(); ++j) m = std::max(m, std::abs(f[j]));
  return m;
}

void subtract_nodal_mean(GridField& f) {
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j) s += f[j];
  const double mean = s / f.n();
  for (int j = 0; j < f.n(); ++j) f[j] -= mean;
}

}  // namespace

GridField pressure_of(const GridField& h, const ModelParams& params) {
  if (params.chi()) {
    throw NumericsError("the wall-viscosity term is active (r = 3): pressure needs wdot");
  }
  return params.beta * deriv_x(h, 4);
}

GridField pressure_of(const GridField& h, const GridField& wdot, const ModelParams& params) {
  GridField p = params.beta * deriv_x(h, 4);
  if (params.chi()) p = p - params.delta * deriv_x(wdot, 2);
  return p;
}

GridField flux_of(const GridField& h, const GridField& p, const GridField& phi) {
  const GridField drive = (1.0 / 12.0) * deriv_x(p, 1) - phi;
  return dealias_two_thirds(hadamard(cube(h), drive));
}

double dispersion_rate(double k, double hbar, const ModelParams& params) {
  const double h3 = hbar * hbar * hbar;
  const double k4 = k * k * k * k;
  const double numerator = -(params.beta / 12.0) * h3 * k4 * k * k;
  const double denominator = 1.0 + (params.chi() ? (params.delta / 12.0) * h3 * k4 : 0.0);
  return numerator / denominator;
}

double default_dt0(const GridField& h0, const ModelParams& params) {
  const double M = max_cube(h0);
  const double half_n = h0.n() / 2.0;
  return 0.1 * (12.0 / (params.beta * M)) * std::pow(half_n, -6.0) * 10.0;
}

GridField implicit_wdot_solve(const GridField& h, const GridField& rhs, const ModelParams& params) {
  if (!(min_value(h) > 0.0)) throw NumericsError("implicit height-rate solve needs h > 0");
  if (params.delta == 0.0) return rhs;

  const GridField h3 = cube(h);
  const double coeff = params.delta / 12.0;

  auto apply_op = [&](const GridField& w) {
    // w + (delta/12) dx(h^3 w_xxx), product dealiased exactly as in flux_of
    return w + coeff * deriv_x(dealias_two_thirds(hadamard(h3, deriv_x(w, 3))), 1);
  };

  // constant-coefficient symbol preconditioner
  const double hbar3 = mean_integral(h3);
  const PeriodicGrid grid = h.grid;
  auto apply_precond = [&](const GridField& f) {
    Spectrum bins = forward_spectrum(f);
    for (int m = 0; m <= grid.n / 2; ++m) {
      const double k = wavenumber(m);
      bins[static_cast<size_t>(m)] /= 1.0 + coeff * hbar3 * k * k * k * k;
    }
    return inverse_spectrum(bins, grid);
  };

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) return GridField(grid);
  const double tol = params.newton_tol * bnorm;

  // right-preconditioned BiCGStab, matrix-free
  GridField x = apply_precond(rhs);
  GridField r = rhs - apply_op(x);
  const GridField rhat = r;
  GridField p(grid);
  GridField v(grid);
  double rho = 1.0;
  double alpha = 1.0;
  double omega = 1.0;

  for (int it = 0; it < params.max_inner_iters; ++it) {
    if (norm2(r) <= tol) {
      subtract_nodal_mean(x);
      return x;
    }
    const double rho_next = dot(rhat, r);
    if (std::abs(rho_next) < 1e-300) break;
    const double beta_factor = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    p = r + beta_factor * (p - omega * v);
    const GridField phat = apply_precond(p);
    v = apply_op(phat);
    const double rv = dot(rhat, v);
    if (std::abs(rv) < 1e-300) break;
    alpha = rho / rv;
    const GridField s = r - alpha * v;
    if (norm2(s) <= tol) {
      x = x + alpha * phat;
      subtract_nodal_mean(x);
      return x;
    }
    const GridField shat = apply_precond(s);
    const GridField t = apply_op(shat);
    const double tt = dot(t, t);
    if (tt < 1e-300) break;
    omega = dot(t, s) / tt;
    x = x + alpha * phat + omega * shat;
    r = s - omega * t;
  }
  if (norm2(r) <= tol) {
    subtract_nodal_mean(x);
    return x;
  }
  throw NumericsError("implicit height-rate solve did not converge within " +
                      std::to_string(params.max_inner_iters) + " iterations (relative residual " +
                      std::to_string(norm2(r) / bnorm) + ")");
}

Stepper::Stepper(ModelParams params, Scheme scheme)
    : params_(validate_params(params)), scheme_(scheme) {}

GridField Stepper::phi_at(const PeriodicGrid& grid, double t) const {
  if (params_.forcing.f1.empty()) return GridField(grid);
  const bool time_dependent = params_.forcing.f1.uses_var('t');
  const double key = time_dependent ? t : 0.0;
  for (const auto& [kt, field] : phi_memo_) {
    if (kt == key && field.grid == grid) return field;
  }
  GridField phi = phi_field(params_.forcing, grid, key);
  phi_memo_.emplace_back(key, phi);
  if (phi_memo_.size() > 4) phi_memo_.erase(phi_memo_.begin());
  return phi;
}

GridField Stepper::rhs_explicit(const GridField& h, double t) const {
  const GridField p_bending = params_.beta * deriv_x(h, 4);
  return flux_divergence(flux_of(h, p_bending, phi_at(h.grid, t)));
}

GridField Stepper::wdot_of(const GridField& h, double t) const {
  if (!params_.chi()) return rhs_explicit(h, t);
  return implicit_wdot_solve(h, rhs_explicit(h, t), params_);
}

const GridField& Stepper::last_w() const {
  if (last_w_.n() == 0) throw NumericsError("no step has been accepted yet");
  return last_w_;
}

void Stepper::reset_history() { have_history_ = false; }

FilmState Stepper::step(const FilmState& state, double dt) {
  if (!(dt > 0.0)) throw NumericsError("step needs dt > 0");
  const PeriodicGrid grid = state.h.grid;
  const int nh = grid.n / 2;
  const double t_new = state.t + dt;

  if (!(min_value(state.h) > params_.h_floor)) {
    throw NumericsError("step entered with height at or below h_floor");
  }

  // BDF2 history is only valid for a repeat of the same dt from the stored
  // predecessor; anything else falls back to a backward Euler bootstrap.
  const bool bdf2 = scheme_ == Scheme::BDF2 && have_history_ && prev_dt_ == dt;
  const double M = max_cube(state.h);

  GridField h_new(grid);
  GridField w_new(grid);
  Spectrum rhs_at_now_hat;  // N(h^n, t^n), stashed for the next BDF2 step

  if (!params_.chi()) {
    // stabilizing shell: the constant-coefficient sixth-order symbol
    auto lambda = [&](int m) {
      const double k = wavenumber(m);
      return (params_.beta / 12.0) * M * k * k * k * k * k * k;
    };

    const GridField rhs_now = rhs_explicit(state.h, bdf2 ? state.t : t_new);
    const Spectrum rhs_hat = forward_spectrum(rhs_now);
    Spectrum delta(static_cast<size_t>(nh + 1));
    if (!bdf2) {
      for (int m = 1; m <= nh; ++m) {
        delta[static_cast<size_t>(m)] = dt * rhs_hat[static_cast<size_t>(m)] / (1.0 + dt * lambda(m));
      }
    } else {
      const Spectrum h_hat = forward_spectrum(state.h);
      const Spectrum h_prev_hat = forward_spectrum(prev_.h);
      for (int m = 1; m <= nh; ++m) {
        const size_t i = static_cast<size_t>(m);
        const std::complex<double> star = 2.0 * rhs_hat[i] - prev_rhs_hat_[i];
        const std::complex<double> dh = h_hat[i] - h_prev_hat[i];
        delta[i] = (dh * (1.0 + 2.0 * dt * lambda(m)) + 2.0 * dt * star) / (3.0 + 2.0 * dt * lambda(m));
      }
    }
    delta[0] = 0.0;  // flux form: the mean never moves
    h_new = state.h + inverse_spectrum(delta, grid);
    // discrete rate; the chi = 0 model never consumes w beyond reporting
    w_new = (1.0 / dt) * (h_new - state.h);
    const bool phi_time_dep = !params_.forcing.f1.empty() && params_.forcing.f1.uses_var('t');
    // the backward Euler rhs sits at the implicit time level; with static
    // forcing it equals N(h^n, t^n) bitwise
    if (!bdf2 && phi_time_dep) {
      rhs_at_now_hat = forward_spectrum(rhs_explicit(state.h, state.t));
    } else {
      rhs_at_now_hat = rhs_hat;
    }
  } else {
    // fixed point in h with the damped shell of the full chi symbol
    auto lambda = [&](int m) {
      const double k = wavenumber(m);
      const double k4 = k * k * k * k;
      return (params_.beta / 12.0) * M * k4 * k * k / (1.0 + (params_.delta / 12.0) * M * k4);
    };
    const double c = bdf2 ? 2.0 * dt / 3.0 : dt;
    const Spectrum h_hat = forward_spectrum(state.h);
    Spectrum g_minus_h(static_cast<size_t>(nh + 1));  // target minus h^n
    if (bdf2) {
      const Spectrum h_prev_hat = forward_spectrum(prev_.h);
      for (int m = 1; m <= nh; ++m) {
        const size_t i = static_cast<size_t>(m);
        g_minus_h[i] = (h_hat[i] - h_prev_hat[i]) / 3.0;
      }
    }

    GridField h_iter = state.h;
    const double scale = std::max(1.0, max_abs(state.h));
    bool converged = false;
    for (int it = 0; it < params_.max_inner_iters; ++it) {
      w_new = implicit_wdot_solve(h_iter, rhs_explicit(h_iter, t_new), params_);
      const Spectrum w_hat = forward_spectrum(w_new);
      const Spectrum hi_hat = forward_spectrum(h_iter);
      Spectrum delta(static_cast<size_t>(nh + 1));
      for (int m = 1; m <= nh; ++m) {
        const size_t i = static_cast<size_t>(m);
        delta[i] = (g_minus_h[i] + c * (w_hat[i] + lambda(m) * (hi_hat[i] - h_hat[i]))) /
                   (1.0 + c * lambda(m));
      }
      delta[0] = 0.0;
      GridField h_next = state.h + inverse_spectrum(delta, grid);
      const double move = max_abs(h_next - h_iter);
      h_iter = std::move(h_next);
      if (move <= params_.newton_tol * scale) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericsError("height update fixed point did not converge within " +
                          std::to_string(params_.max_inner_iters) + " iterations");
    }
    h_new = std::move(h_iter);
  }

  const double floor = params_.h_floor;
  for (int j = 0; j < grid.n; ++j) {
    if (!(h_new[j] > floor)) {
      throw PositivityViolation(j, t_new, h_new[j]);
    }
  }

  if (params_.chi()) {
    // re-solve at the accepted state so the stored w satisfies the implicit
    // system there, not at the penultimate iterate
    w_new = implicit_wdot_solve(h_new, rhs_explicit(h_new, t_new), params_);
  }

  prev_ = state;
  prev_dt_ = dt;
  prev_rhs_hat_ = std::move(rhs_at_now_hat);
  have_history_ = true;
  last_w_ = w_new;
  return FilmState{t_new, std::move(h_new)};
}

Trajectory run(const RunConfig& config) {
  const ModelParams params = validate_params(config.params);
  GridField h0 = initial_field(config);
  const PeriodicGrid grid = config.grid;
  const double dt0 = config.dt0 > 0.0 ? config.dt0 : default_dt0(h0, params);
  const double dt_min = dt0 * 1e-8;

  Stepper stepper(params, config.scheme);
  Trajectory traj;
  FilmState state{0.0, std::move(h0)};

  auto record_state = [&](const FilmState& s, double dt, const GridField& w) {
    const GridField phi = stepper.phi_at(grid, s.t);
    const GridField p = pressure_of(s.h, w, params);
    traj.records.push_back(make_record(s.t, dt, s.h, w, p, phi, params));
  };

  {
    const GridField w0 = stepper.wdot_of(state.h, 0.0);
    record_state(state, dt0, w0);
    traj.snapshots.push_back(Snapshot{state, w0});
  }

  double dt = dt0;
  int clean = 0;
  long steps = 0;
  const double t_tiny = 1e-12 * config.t_end;

  while (state.t < config.t_end - t_tiny) {
    const double remaining = config.t_end - state.t;
    double dt_try = dt;
    if (remaining <= dt * (1.0 + 1e-9)) dt_try = remaining;

    FilmState next;
    try {
      next = stepper.step(state, dt_try);
    } catch (const PositivityViolation& violation) {
      stepper.reset_history();
      dt *= 0.5;
      clean = 0;
      if (dt < dt_min) {
        traj.status = RunStatus::Positivity;
        traj.failure_note = std::string(violation.what()) + " (time step exhausted at t = " +
                            std::to_string(state.t) + ")";
        traj.last_good_time = state.t;
        return traj;
      }
      continue;
    } catch (const NumericsError& numerics) {
      stepper.reset_history();
      dt *= 0.5;
      clean = 0;
      if (dt < dt_min) {
        traj.status = RunStatus::Unrecoverable;
        traj.failure_note = std::string(numerics.what()) + " (time step exhausted at t = " +
                            std::to_string(state.t) + ")";
        traj.last_good_time = state.t;
        return traj;
      }
      continue;
    }

    state = std::move(next);
    ++steps;
    ++clean;
    record_state(state, dt_try, stepper.last_w());
    if (steps % config.output_every == 0) {
      traj.snapshots.push_back(Snapshot{state, stepper.last_w()});
    }
    if (clean >= 10 && dt < dt0) {
      dt = std::min(dt * 1.2, dt0);
      clean = 0;
      stepper.reset_history();
    }
  }

  if (traj.snapshots.back().state.t != state.t) {
    traj.snapshots.push_back(Snapshot{state, stepper.last_w()});
  }
  traj.status = RunStatus::Completed;
  traj.last_good_time = state.t;
  return traj;
}

}  // namespace thinfilm
