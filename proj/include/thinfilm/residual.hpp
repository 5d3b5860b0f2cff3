#pragma once

#include <span>
#include <string>
#include <vector>

#include "thinfilm/forcing.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/params.hpp"
#include "thinfilm/reconstruct.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

// Trigonometric polynomial c0 + sum_m (a_m cos(2 pi m x) + b_m sin(2 pi m x)),
// mode m = index + 1.
struct TrigPoly {
  double c0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  double eval(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

// Polynomial in y, ascending coefficients.
struct YPoly {
  std::vector<double> c;

  double eval(double y) const;
  double d1(double y) const;
};

// Coupled test pair on the reference strip over one time window:
//
//   phi(x, y, t) = (x1(x) y1(y), x2(x) y2(y)) * bump(t)
//   psi(x, t)    = x2(x) * bump(t)
//
// y1 vanishes at both walls and y2(0) = 0, y2(1) = 1, so the trace condition
// phi(x, 1, t) = (0, psi(x, t)) holds exactly by construction. The bump
// sin^2(pi (t - t0)/duration) vanishes at both window ends, which makes the
// time integrations by parts boundary-free.
struct TestFunctionPair {
  std::string name;
  TrigPoly x1;
  YPoly y1;
  TrigPoly x2;
  YPoly y2;
  double t0 = 0.0;
  double duration = 1.0;

  double bump(double t) const;
  double bump_dt(double t) const;
};

// Three fixed generic pairs supported on [t0, t0 + duration]. Their x-parts
// mix low cosine and sine modes so no term integral vanishes by parity.
std::vector<TestFunctionPair> bundled_test_pairs(double t0, double duration);

// Rescaled gradient of a scalar plane field at film thickness eps * h:
//
//   horizontal = dx f - y (dx h / h) dy f
//   vertical   = (1/(eps h)) dy f
//
// dx is spectral per y-level; dy differentiates the Lagrange interpolant
// through the field's own y-nodes (exact for polynomial data of degree < q).
struct PlaneGradient {
  PlaneField horizontal;
  PlaneField vertical;
};

PlaneGradient rescaled_gradient(const PlaneField& f, const GridField& h, double eps);

// One snapshot window of a thin-film trajectory with every table the weak-form
// integrals reuse across eps values and test pairs. Snapshot times must be
// uniformly spaced with count 4k+1, k >= 1: composite Simpson needs the odd
// count and the built-in resolution check halves the sampling once more.
struct WeakWindow {
  PeriodicGrid grid;
  std::vector<double> y;        // Gauss-Legendre nodes shared with the forcing quadrature
  std::vector<double> yw;       // matching weights
  std::vector<double> times;
  std::vector<GridField> h;     // film height (the rescaled displacement)
  std::vector<GridField> w;     // its time derivative, from the solver
  std::vector<GridField> p;     // pressure reconstructed from (h, w)
  std::vector<GridField> px;    // dx p
  std::vector<GridField> hx;    // dx h
  std::vector<GridField> hxx;   // dxx h
  std::vector<GridField> phi;   // forcing potential
  std::vector<PlaneField> v1;   // limit velocity profile
  std::vector<PlaneField> dv1;  // its horizontal rescaled derivative (eps-free)
  std::vector<PlaneField> v1y;  // its vertical node derivative (before the 1/(eps h))
  std::vector<PlaneField> f1;   // force density samples

  int steps() const { return static_cast<int>(times.size()); }
};

WeakWindow build_weak_window(const Trajectory& trajectory, const ModelParams& params,
                             int quad_order);

// One integral of the weak formulation, prefactor included, with the
// symbolically predicted eps-exponent of its magnitude.
struct WeakTerm {
  double value = 0.0;
  double predicted_exponent = 0.0;

  double magnitude() const;
};

// The eight equation terms plus the incompressibility defect of the
// reconstructed velocity (the pressure pairing applied to v itself, which a
// divergence-free field would null). weak_sum is the signed sum of the
// equation terms, defect excluded; its eps^2-scaled limit is the residual of
// the limit pressure identity.
struct TermBreakdown {
  WeakTerm inertia_time;
  WeakTerm convection;
  WeakTerm viscous;
  WeakTerm pressure;
  WeakTerm structure_inertia;
  WeakTerm structure_visco;
  WeakTerm structure_bending;
  WeakTerm force;
  WeakTerm divergence_defect;

  double weak_sum() const;
};

// Term names in breakdown order, shared by the sweep table and the CSV.
std::span<const char* const> weak_term_names();

// Evaluates every term at thickness eps on the window's reconstructed fields.
// Fluid integrals take the finite-thickness fields (eta = eps h as the
// measure, v = eps^2 v1, p unscaled); the pressure integral and the structure
// integrals keep the order-one thickness weight so the eps^2-scaled sum
// retains the limit pressure identity. Throws NumericsError when halving the
// Simpson resolution moves any resolved term by more than 1%.
TermBreakdown assemble_terms(const WeakWindow& window, const TestFunctionPair& pair,
                             const ModelParams& params, double eps);

// Least-squares log-log slope of one term across the sweep.
struct SweepSeries {
  std::string term;
  std::string pair;
  double predicted_exponent = 0.0;
  double fitted_slope = 0.0;
  std::vector<double> eps;
  std::vector<double> magnitude;
};

// Sweeps eps over a geometric list (>= 4 values in (0,1)) for every pair and
// fits each term's slope. A term that is not identically zero but has fewer
// than 4 nonzero finite points is a degenerate fit: NumericsError. A term
// that vanishes at every eps for every pair is also degenerate: the sweep
// cannot say anything about it.
std::vector<SweepSeries> eps_sweep_slopes(const WeakWindow& window,
                                          std::span<const double> eps_list,
                                          std::span<const TestFunctionPair> pairs,
                                          const ModelParams& params);

// Residuals of the limit identities on the window, tested with psi from the
// pair (the Reynolds form uses the same scalar):
//
//   pressure: chi delta int h dt dxx psi + beta int dxx h dxx psi = int p psi
//   reynolds: int h^3((1/12) dx p - Phi) dx psi = int h dt psi
//
// Each residual comes with the largest constituent magnitude as its scale.
struct LimitResidualReport {
  double pressure_residual = 0.0;
  double pressure_scale = 0.0;
  double reynolds_residual = 0.0;
  double reynolds_scale = 0.0;
};

LimitResidualReport limit_residual(const WeakWindow& window, const TestFunctionPair& pair,
                                   const ModelParams& params);

}  // namespace thinfilm
