#include "thinfilm/mms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

namespace {

constexpr double kAmp = 0.3;      // manufactured amplitude, keeps h >= 0.7
constexpr double kGamma = 1e4;    // decay rate; t_end * gamma = 1 spans one e-fold
constexpr double kTempEnd = 1e-4;

// g17 literal wrapped in parentheses so a sign never collides with the
// surrounding operator.
std::string lit(double v) { return "(" + format_g17(v) + ")"; }

// f1 = -12 Phi for the manufactured decay. Phi has a pure-cosine part with
// coefficient kcos (bending plus, on the coupled branch, the wall term) and
// the flux-quotient part with coefficient m over (1 + a E sin)^3.
Expr manufactured_f1(double kcos, double m) {
  const std::string envelope = "exp(" + lit(-kGamma) + "*t)";
  const std::string text = lit(-12.0) + "*(" + lit(kcos) + "*" + envelope + "*cos(2*pi*x)" +
                           " - " + lit(m) + "*" + envelope + "*cos(2*pi*x)" + "/(1+" +
                           lit(kAmp) + "*" + envelope + "*sin(2*pi*x))^3)";
  return Expr::parse(text, "xt");
}

double manufactured_h(double x, double t) {
  return 1.0 + kAmp * std::exp(-kGamma * t) * std::sin(2.0 * std::numbers::pi * x);
}

StudyRow run_temporal_rung(const std::string& branch, Scheme scheme, const ModelParams& params,
                           int steps) {
  RunConfig config;
  config.grid = build_grid(32);
  config.params = params;
  config.initial.profile = Expr::parse("1+" + lit(kAmp) + "*sin(2*pi*x)", "x");
  config.dt0 = kTempEnd / steps;
  config.t_end = kTempEnd;
  config.scheme = scheme;
  config.output_every = steps;

  const Trajectory traj = run(config);
  if (traj.status != RunStatus::Completed) {
    throw NumericsError("temporal study rung failed: " + traj.failure_note);
  }
  const GridField& h = traj.snapshots.back().state.h;

  StudyRow row;
  row.study = "temporal";
  row.branch = branch;
  row.scheme = scheme_name(scheme);
  row.n = config.grid.n;
  row.dt = config.dt0;
  row.steps = steps;
  for (int j = 0; j < h.n(); ++j) {
    row.error = std::max(row.error, std::abs(h[j] - manufactured_h(h.grid.node(j), kTempEnd)));
  }
  return row;
}

void fill_orders(std::vector<StudyRow>& rows, size_t first) {
  for (size_t i = first + 1; i < rows.size(); ++i) {
    rows[i].order = std::log2(rows[i - 1].error / rows[i].error);
  }
}

}  // namespace

std::vector<StudyRow> temporal_study(Scheme scheme, std::span<const int> step_counts) {
  if (step_counts.size() < 2) throw ConfigError("temporal study needs at least two rungs");
  for (size_t i = 1; i < step_counts.size(); ++i) {
    if (step_counts[i] <= step_counts[i - 1]) {
      throw ConfigError("temporal study step counts must increase");
    }
  }

  const double twopi = 2.0 * std::numbers::pi;
  const double quotient = kAmp * kGamma / twopi;

  ModelParams uncoupled;
  uncoupled.beta = 1.0;
  uncoupled.delta = 12.0;
  uncoupled.r = 2.0;
  uncoupled.forcing = make_forcing_spec(
      manufactured_f1(uncoupled.beta / 12.0 * kAmp * std::pow(twopi, 5), quotient), std::nullopt,
      kTempEnd);

  ModelParams coupled;
  coupled.beta = 12.0;
  coupled.delta = 1.2;
  coupled.r = 3.0;
  coupled.forcing = make_forcing_spec(
      manufactured_f1(coupled.beta / 12.0 * kAmp * std::pow(twopi, 5) -
                          coupled.delta / 12.0 * kAmp * kGamma * std::pow(twopi, 3),
                      quotient),
      std::nullopt, kTempEnd);

  std::vector<StudyRow> rows;
  for (const auto& [branch, params] :
       {std::pair<std::string, const ModelParams*>{"uncoupled", &uncoupled},
        std::pair<std::string, const ModelParams*>{"coupled", &coupled}}) {
    const size_t first = rows.size();
    for (int steps : step_counts) rows.push_back(run_temporal_rung(branch, scheme, *params, steps));
    fill_orders(rows, first);
  }
  return rows;
}

std::vector<StudyRow> spatial_study(std::span<const int> grids, int reference_n) {
  if (grids.empty()) throw ConfigError("spatial study needs at least one grid");

  constexpr double kDt = 1e-8;
  constexpr int kSteps = 100;
  constexpr double kEnd = kDt * kSteps;

  const auto solve_on = [&](int n) {
    RunConfig config;
    config.grid = build_grid(n);
    config.params.beta = 12.0;
    config.params.delta = 12.0;
    config.params.r = 2.0;
    config.initial.profile = Expr::parse("exp(2*sin(2*pi*x))", "x");
    config.dt0 = kDt;
    config.t_end = kEnd;
    config.scheme = Scheme::BDF2;
    config.output_every = kSteps;
    const Trajectory traj = run(config);
    if (traj.status != RunStatus::Completed) {
      throw NumericsError("spatial study run failed: " + traj.failure_note);
    }
    return traj.snapshots.back().state.h;
  };

  const GridField reference = solve_on(reference_n);

  std::vector<StudyRow> rows;
  for (int n : grids) {
    if (n <= 0 || reference_n % n != 0 || n >= reference_n) {
      throw ConfigError("spatial study grids must divide the reference grid");
    }
    const GridField h = solve_on(n);
    const int stride = reference_n / n;
    StudyRow row;
    row.study = "spatial";
    row.branch = "decay";
    row.scheme = scheme_name(Scheme::BDF2);
    row.n = n;
    row.dt = kDt;
    row.steps = kSteps;
    for (int j = 0; j < n; ++j) {
      row.error = std::max(row.error, std::abs(h[j] - reference[j * stride]));
    }
    rows.push_back(row);
  }
  fill_orders(rows, 0);
  return rows;
}

}  // namespace thinfilm
