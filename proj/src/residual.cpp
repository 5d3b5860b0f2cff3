#include "thinfilm/residual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Composite Simpson over an odd number of uniformly spaced samples.
double simpson_uniform(std::span<const double> v, double dt) {
  const size_t m = v.size();
  double s = v.front() + v.back();
  for (size_t k = 1; k + 1 < m; ++k) s += v[k] * (k % 2 == 1 ? 4.0 : 2.0);
  return s * dt / 3.0;
}

double simpson_stride2(std::span<const double> v, double dt) {
  std::vector<double> half;
  half.reserve((v.size() + 1) / 2);
  for (size_t k = 0; k < v.size(); k += 2) half.push_back(v[k]);
  return simpson_uniform(half, 2.0 * dt);
}

void require_open_unit_eps(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw ConfigError("eps must lie in the open interval (0, 1)");
  }
}

void require_window_shape(std::span<const double> times) {
  const size_t m = times.size();
  if (m < 5 || (m - 1) % 4 != 0) {
    throw ConfigError("weak window needs 4k+1 snapshots, k >= 1; got " + std::to_string(m));
  }
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw NumericsError("weak window needs strictly increasing snapshot times");
  for (size_t k = 1; k + 1 < m; ++k) {
    const double dk = times[k + 1] - times[k];
    if (std::abs(dk / dt - 1.0) > 1e-9) {
      throw NumericsError("weak window needs uniformly spaced snapshot times");
    }
  }
}

void require_matching_support(const TestFunctionPair& pair, std::span<const double> times) {
  const double tol = 1e-9 * pair.duration;
  if (!(pair.duration > 0.0) || std::abs(pair.t0 - times.front()) > tol ||
      std::abs(pair.t0 + pair.duration - times.back()) > tol) {
    throw ConfigError("test pair support must match the snapshot window");
  }
}

// Test-function factors sampled once per (window, pair).
struct PairTables {
  std::vector<double> x1, x1p;        // phi1 horizontal factor and derivative
  std::vector<double> x2, x2p, x2pp;  // phi2 / psi horizontal factor
  std::vector<double> y1, y1p;        // phi1 vertical factor
  std::vector<double> y2, y2p;        // phi2 vertical factor
  double int_y1 = 0.0;                // int y1 dy
  double int_y_y1p = 0.0;             // int y y1' dy
  double int_y2p = 0.0;               // int y2' dy = y2(1) - y2(0)
};

PairTables sample_pair(const WeakWindow& window, const TestFunctionPair& pair) {
  PairTables t;
  const int n = window.grid.n;
  t.x1.resize(n);
  t.x1p.resize(n);
  t.x2.resize(n);
  t.x2p.resize(n);
  t.x2pp.resize(n);
  for (int j = 0; j < n; ++j) {
    const double x = window.grid.node(j);
    t.x1[j] = pair.x1.eval(x);
    t.x1p[j] = pair.x1.d1(x);
    t.x2[j] = pair.x2.eval(x);
    t.x2p[j] = pair.x2.d1(x);
    t.x2pp[j] = pair.x2.d2(x);
  }
  const size_t q = window.y.size();
  t.y1.resize(q);
  t.y1p.resize(q);
  t.y2.resize(q);
  t.y2p.resize(q);
  for (size_t i = 0; i < q; ++i) {
    const double y = window.y[i];
    t.y1[i] = pair.y1.eval(y);
    t.y1p[i] = pair.y1.d1(y);
    t.y2[i] = pair.y2.eval(y);
    t.y2p[i] = pair.y2.d1(y);
    t.int_y1 += window.yw[i] * t.y1[i];
    t.int_y_y1p += window.yw[i] * y * t.y1p[i];
    t.int_y2p += window.yw[i] * t.y2p[i];
  }
  return t;
}

// Raw per-snapshot time series of every integral piece, before any eps power.
// Physical coefficients and signs are folded in, so value = sum eps^s * S[.].
struct RawSeries {
  std::vector<double> inertia, convection;
  std::vector<double> viscous_a, viscous_b, viscous_c;  // eps^2, eps^3, eps^4
  std::vector<double> pressure_a, pressure_b;           // eps^-1, eps^-2
  std::vector<double> s_inertia, s_visco, s_bending;
  std::vector<double> force, defect;
};

RawSeries assemble_raw(const WeakWindow& window, const PairTables& pt,
                       const TestFunctionPair& pair, const ModelParams& params) {
  const int m = window.steps();
  const int n = window.grid.n;
  const int q = static_cast<int>(window.y.size());
  const double dx = window.grid.dx();

  RawSeries r;
  auto init = [m](std::vector<double>& v) { v.assign(static_cast<size_t>(m), 0.0); };
  init(r.inertia);
  init(r.convection);
  init(r.viscous_a);
  init(r.viscous_b);
  init(r.viscous_c);
  init(r.pressure_a);
  init(r.pressure_b);
  init(r.s_inertia);
  init(r.s_visco);
  init(r.s_bending);
  init(r.force);
  init(r.defect);

  for (int k = 0; k < m; ++k) {
    const double bump = pair.bump(window.times[k]);
    const double bump_dt = pair.bump_dt(window.times[k]);
    const GridField& h = window.h[k];
    const GridField& w = window.w[k];
    const GridField& p = window.p[k];
    const GridField& hx = window.hx[k];
    const GridField& hxx = window.hxx[k];
    const PlaneField& v1 = window.v1[k];
    const PlaneField& dv1 = window.dv1[k];
    const PlaneField& v1y = window.v1y[k];
    const PlaneField& f1 = window.f1[k];

    double a_inertia = 0.0, a_conv = 0.0, a_va = 0.0, a_vb = 0.0, a_vc = 0.0;
    double a_pa = 0.0, a_pb = 0.0, a_si = 0.0, a_sv = 0.0, a_sb = 0.0;
    double a_force = 0.0, a_defect = 0.0;

    for (int j = 0; j < n; ++j) {
      const double tilt = hx[j] / h[j];  // d_x eta / eta, scale invariant

      double s_v1_y1 = 0.0;      // int v1 y1 dy
      double s_v1dv1_y1 = 0.0;   // int v1 dv1 y1 dy
      double s_v1y_y1p = 0.0;    // int v1y y1' dy
      double s_v1y_y2 = 0.0;     // int v1y y2 dy
      double s_yv1y_y2p = 0.0;   // int y v1y y2' dy
      double s_dv1_y1 = 0.0;     // int dv1 y1 dy
      double s_ydv1_y1p = 0.0;   // int y dv1 y1' dy
      double s_dv1 = 0.0;        // int dv1 dy
      double s_f1_y1 = 0.0;      // int f1 y1 dy
      for (int i = 0; i < q; ++i) {
        const double wy = window.yw[i];
        const double y = window.y[i];
        const double v = v1.at(j, i);
        const double dv = dv1.at(j, i);
        const double vy = v1y.at(j, i);
        s_v1_y1 += wy * v * pt.y1[i];
        s_v1dv1_y1 += wy * v * dv * pt.y1[i];
        s_v1y_y1p += wy * vy * pt.y1p[i];
        s_v1y_y2 += wy * vy * pt.y2[i];
        s_yv1y_y2p += wy * y * vy * pt.y2p[i];
        s_dv1_y1 += wy * dv * pt.y1[i];
        s_ydv1_y1p += wy * y * dv * pt.y1p[i];
        s_dv1 += wy * dv;
        s_f1_y1 += wy * f1.at(j, i) * pt.y1[i];
      }

      a_inertia += pt.x1[j] * h[j] * s_v1_y1;
      a_conv += pt.x1[j] * h[j] * s_v1dv1_y1;
      a_va += (pt.x1[j] / h[j]) * s_v1y_y1p;
      a_vb += pt.x2p[j] * s_v1y_y2 - tilt * pt.x2[j] * s_yv1y_y2p;
      a_vc += 2.0 * h[j] * (pt.x1p[j] * s_dv1_y1 - tilt * pt.x1[j] * s_ydv1_y1p);
      a_pa += p[j] * h[j] * (pt.x1p[j] * pt.int_y1 - tilt * pt.x1[j] * pt.int_y_y1p);
      a_pb += p[j] * pt.x2[j];
      a_si += w[j] * pt.x2[j];
      a_sv += w[j] * pt.x2pp[j];
      a_sb += hxx[j] * pt.x2pp[j];
      a_force += pt.x1[j] * h[j] * s_f1_y1;
      a_defect += p[j] * h[j] * s_dv1;
    }

    r.inertia[k] = -dx * a_inertia * bump_dt;
    r.convection[k] = dx * a_conv * bump;
    r.viscous_a[k] = dx * a_va * bump;
    r.viscous_b[k] = dx * a_vb * bump;
    r.viscous_c[k] = dx * a_vc * bump;
    r.pressure_a[k] = -dx * a_pa * bump;
    r.pressure_b[k] = -dx * a_pb * pt.int_y2p * bump;
    r.s_inertia[k] = -params.rho * dx * a_si * bump_dt;
    r.s_visco[k] = -params.delta * dx * a_sv * bump;
    r.s_bending[k] = params.beta * dx * a_sb * bump;
    r.force[k] = -dx * a_force * bump;
    r.defect[k] = -dx * a_defect * bump;
  }
  return r;
}

struct PieceIntegral {
  const char* term;
  double full = 0.0;
};

// Throws when halving the time sampling moves any piece by more than 1%.
// Pieces whose integral sits at the cancellation floor of their own samples
// carry no resolution information and are skipped, as are pieces far below
// the largest piece.
void check_resolution(std::span<const PieceIntegral> pieces,
                      std::span<const std::vector<double>* const> series, double dt) {
  double max_full = 0.0;
  for (const PieceIntegral& p : pieces) max_full = std::max(max_full, std::abs(p.full));
  if (max_full == 0.0) return;
  for (size_t i = 0; i < pieces.size(); ++i) {
    const double full = pieces[i].full;
    if (std::abs(full) < 1e-12 * max_full) continue;
    double l1 = 0.0;
    for (double v : *series[i]) l1 += std::abs(v);
    l1 *= dt;
    if (std::abs(full) <= 1e-9 * l1) continue;  // pure cancellation artifact
    const double coarse = simpson_stride2(*series[i], dt);
    if (std::abs(coarse - full) > 0.01 * std::abs(full)) {
      throw NumericsError(std::string("snapshot cadence too coarse: halving the time ") +
                          "resolution moves the " + pieces[i].term + " integral by more than 1%");
    }
  }
}

double fit_loglog_slope(std::span<const double> eps, std::span<const double> magnitude,
                        const std::string& term, const std::string& pair) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (std::isfinite(magnitude[i]) && magnitude[i] > 0.0) {
      xs.push_back(std::log(eps[i]));
      ys.push_back(std::log(magnitude[i]));
    }
  }
  if (xs.size() < 4) {
    throw NumericsError("eps sweep: degenerate fit for term '" + term + "' with pair '" + pair +
                        "': fewer than 4 usable magnitudes");
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double TrigPoly::eval(double x) const {
  double s = c0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * std::cos(kTwoPi * (i + 1) * x);
  for (size_t i = 0; i < b.size(); ++i) s += b[i] * std::sin(kTwoPi * (i + 1) * x);
  return s;
}

double TrigPoly::d1(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double k = kTwoPi * (i + 1);
    s -= a[i] * k * std::sin(k * x);
  }
  for (size_t i = 0; i < b.size(); ++i) {
    const double k = kTwoPi * (i + 1);
    s += b[i] * k * std::cos(k * x);
  }
  return s;
}

double TrigPoly::d2(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double k = kTwoPi * (i + 1);
    s -= a[i] * k * k * std::cos(k * x);
  }
  for (size_t i = 0; i < b.size(); ++i) {
    const double k = kTwoPi * (i + 1);
    s -= b[i] * k * k * std::sin(k * x);
  }
  return s;
}

double YPoly::eval(double y) const {
  double s = 0.0;
  for (size_t i = c.size(); i > 0; --i) s = s * y + c[i - 1];
  return s;
}

double YPoly::d1(double y) const {
  double s = 0.0;
  for (size_t i = c.size(); i > 1; --i) s = s * y + c[i - 1] * static_cast<double>(i - 1);
  return s;
}

double TestFunctionPair::bump(double t) const {
  const double s = std::sin(std::numbers::pi * (t - t0) / duration);
  return s * s;
}

double TestFunctionPair::bump_dt(double t) const {
  return (std::numbers::pi / duration) * std::sin(kTwoPi * (t - t0) / duration);
}

std::vector<TestFunctionPair> bundled_test_pairs(double t0, double duration) {
  if (!(duration > 0.0)) throw ConfigError("test pair duration must be positive");
  std::vector<TestFunctionPair> pairs(3);

  // x2 amplitudes are kept small relative to x1 so that within each impure
  // term the sub-leading piece never swamps the leading one over the sweep
  // range; every x1 carries mode-1 content so its pressure pairing stays
  // anchored on slowly varying windows.
  pairs[0].name = "A";
  pairs[0].x1 = {0.0, {1.0}, {0.5}};
  pairs[0].y1 = {{0.0, 1.0, 0.0, -1.0}};       // y - y^3
  pairs[0].x2 = {0.05, {}, {0.2}};
  pairs[0].y2 = {{0.0, 0.0, 1.0}};             // y^2

  pairs[1].name = "B";
  pairs[1].x1 = {0.0, {0.6}, {0.0, 1.0}};
  pairs[1].y1 = {{0.0, 0.75, 0.25, -1.0}};     // 0.75 y + 0.25 y^2 - y^3
  pairs[1].x2 = {0.0, {0.25, -0.125}, {}};
  pairs[1].y2 = {{0.0, 1.0}};                  // y

  pairs[2].name = "C";
  pairs[2].x1 = {0.0, {0.0, 0.75}, {-1.0, 0.4}};
  pairs[2].y1 = {{0.0, 1.0, -2.0, 1.0}};       // y (1-y)^2
  pairs[2].x2 = {0.0, {0.0, 0.25}, {0.5, 0.15}};
  pairs[2].y2 = {{0.0, 0.0, 3.0, -2.0}};       // 3y^2 - 2y^3

  for (TestFunctionPair& p : pairs) {
    p.t0 = t0;
    p.duration = duration;
  }
  return pairs;
}

PlaneGradient rescaled_gradient(const PlaneField& f, const GridField& h, double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (f.q() < 2) throw ConfigError("rescaled gradient needs at least two y-nodes");
  if (f.grid != h.grid) throw NumericsError("grid mismatch in rescaled gradient");
  if (!(min_value(h) > 0.0)) throw NumericsError("rescaled gradient needs h > 0");

  const int n = f.n();
  const int q = f.q();
  const GridField hx = deriv_x(h, 1);
  const std::vector<double> D = lagrange_diff_matrix(f.y);

  PlaneGradient out{PlaneField(f.grid, f.y), PlaneField(f.grid, f.y)};

  // vertical node derivative, then the x-derivative level by level
  std::vector<double> dyf(static_cast<size_t>(n) * q, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < q; ++i) {
      double s = 0.0;
      for (int k = 0; k < q; ++k) s += D[static_cast<size_t>(i) * q + k] * f.at(j, k);
      dyf[static_cast<size_t>(j) * q + i] = s;
    }
  }
  GridField level(f.grid);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < n; ++j) level[j] = f.at(j, i);
    const GridField dx = deriv_x(level, 1);
    for (int j = 0; j < n; ++j) {
      const double dy = dyf[static_cast<size_t>(j) * q + i];
      out.horizontal.at(j, i) = dx[j] - f.y[i] * (hx[j] / h[j]) * dy;
      out.vertical.at(j, i) = dy / (eps * h[j]);
    }
  }
  return out;
}

WeakWindow build_weak_window(const Trajectory& trajectory, const ModelParams& params,
                             int quad_order) {
  std::vector<double> times;
  times.reserve(trajectory.snapshots.size());
  for (const Snapshot& s : trajectory.snapshots) times.push_back(s.state.t);
  require_window_shape(times);

  const Quadrature01& rule = gauss_legendre01(quad_order);
  const ForcingSpec& spec = params.forcing;

  WeakWindow win;
  win.grid = trajectory.snapshots.front().state.h.grid;
  win.y = rule.nodes;
  win.yw = rule.weights;
  win.times = std::move(times);

  const int m = win.steps();
  const int n = win.grid.n;
  const int q = quad_order;
  win.h.reserve(m);
  win.w.reserve(m);
  win.p.reserve(m);
  win.px.reserve(m);
  win.hx.reserve(m);
  win.hxx.reserve(m);
  win.phi.reserve(m);
  win.v1.reserve(m);
  win.dv1.reserve(m);
  win.v1y.reserve(m);
  win.f1.reserve(m);

  GridField level(win.grid);
  for (int k = 0; k < m; ++k) {
    const Snapshot& snap = trajectory.snapshots[static_cast<size_t>(k)];
    const double t = win.times[static_cast<size_t>(k)];
    const GridField& h = snap.state.h;
    if (h.grid != win.grid) throw NumericsError("weak window needs one shared grid");
    if (!(min_value(h) > 0.0)) throw NumericsError("weak window needs positive heights");

    GridField p = pressure_of(h, snap.w, params);
    GridField px = deriv_x(p, 1);
    GridField hx = deriv_x(h, 1);
    GridField hxx = deriv_x(h, 2);
    GridField phi = phi_field(spec, win.grid, t);
    PlaneField v1 = limit_velocity(h, p, spec, t, rule.nodes);

    // vertical derivative of the velocity profile, in closed form
    PlaneField v1y(win.grid, rule.nodes);
    for (int j = 0; j < n; ++j) {
      const double h2 = h[j] * h[j];
      for (int i = 0; i < q; ++i) {
        const double y = rule.nodes[static_cast<size_t>(i)];
        double val = (y - 0.5) * h2 * px[j];
        if (!spec.f1.empty()) val += h2 * eval_F_dy(spec, win.grid.node(j), y, t);
        v1y.at(j, i) = val;
      }
    }

    // horizontal derivative in the film frame: dx v1 - y (hx/h) dy v1
    PlaneField dv1(win.grid, rule.nodes);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < n; ++j) level[j] = v1.at(j, i);
      const GridField dxl = deriv_x(level, 1);
      for (int j = 0; j < n; ++j) {
        dv1.at(j, i) =
            dxl[j] - rule.nodes[static_cast<size_t>(i)] * (hx[j] / h[j]) * v1y.at(j, i);
      }
    }

    PlaneField f1(win.grid, rule.nodes);
    if (!spec.f1.empty()) {
      for (int j = 0; j < n; ++j) {
        const double x = win.grid.node(j);
        for (int i = 0; i < q; ++i) {
          f1.at(j, i) = spec.f1.eval(x, rule.nodes[static_cast<size_t>(i)], t);
        }
      }
    }

    win.h.push_back(h);
    win.w.push_back(snap.w);
    win.p.push_back(std::move(p));
    win.px.push_back(std::move(px));
    win.hx.push_back(std::move(hx));
    win.hxx.push_back(std::move(hxx));
    win.phi.push_back(std::move(phi));
    win.v1.push_back(std::move(v1));
    win.dv1.push_back(std::move(dv1));
    win.v1y.push_back(std::move(v1y));
    win.f1.push_back(std::move(f1));
  }
  return win;
}

double WeakTerm::magnitude() const { return std::abs(value); }

double TermBreakdown::weak_sum() const {
  return inertia_time.value + convection.value + viscous.value + pressure.value +
         structure_inertia.value + structure_visco.value + structure_bending.value + force.value;
}

std::span<const char* const> weak_term_names() {
  static constexpr const char* kNames[] = {
      "inertia_time",      "convection",     "viscous",
      "pressure",          "structure_inertia", "structure_visco",
      "structure_bending", "force",          "divergence_defect",
  };
  return {kNames, 9};
}

TermBreakdown assemble_terms(const WeakWindow& window, const TestFunctionPair& pair,
                             const ModelParams& params, double eps) {
  require_open_unit_eps(eps);
  require_window_shape(window.times);
  require_matching_support(pair, window.times);

  const PairTables pt = sample_pair(window, pair);
  const RawSeries raw = assemble_raw(window, pt, pair, params);
  const double dt = window.times[1] - window.times[0];

  const PieceIntegral pieces[] = {
      {"inertia_time", simpson_uniform(raw.inertia, dt)},
      {"convection", simpson_uniform(raw.convection, dt)},
      {"viscous", simpson_uniform(raw.viscous_a, dt)},
      {"viscous", simpson_uniform(raw.viscous_b, dt)},
      {"viscous", simpson_uniform(raw.viscous_c, dt)},
      {"pressure", simpson_uniform(raw.pressure_a, dt)},
      {"pressure", simpson_uniform(raw.pressure_b, dt)},
      {"structure_inertia", simpson_uniform(raw.s_inertia, dt)},
      {"structure_visco", simpson_uniform(raw.s_visco, dt)},
      {"structure_bending", simpson_uniform(raw.s_bending, dt)},
      {"force", simpson_uniform(raw.force, dt)},
      {"divergence_defect", simpson_uniform(raw.defect, dt)},
  };
  const std::vector<double>* const series[] = {
      &raw.inertia,    &raw.convection, &raw.viscous_a, &raw.viscous_b,
      &raw.viscous_c,  &raw.pressure_a, &raw.pressure_b, &raw.s_inertia,
      &raw.s_visco,    &raw.s_bending,  &raw.force,      &raw.defect,
  };
  check_resolution(pieces, series, dt);

  const double e1 = eps;
  const double e2 = e1 * e1;
  const double e3 = e2 * e1;
  const double e4 = e2 * e2;
  const double e6 = e4 * e2;
  const double e8 = e4 * e4;
  const double sv_exponent = 1.0 - params.r;

  TermBreakdown out;
  out.inertia_time = {e6 * pieces[0].full, 6.0};
  out.convection = {e8 * pieces[1].full, 8.0};
  out.viscous = {e2 * pieces[2].full + e3 * pieces[3].full + e4 * pieces[4].full, 2.0};
  out.pressure = {pieces[5].full / e1 + pieces[6].full / e2, -2.0};
  out.structure_inertia = {e4 * pieces[7].full, 4.0};
  out.structure_visco = {std::pow(e1, sv_exponent) * pieces[8].full, sv_exponent};
  out.structure_bending = {pieces[9].full / e2, -2.0};
  out.force = {pieces[10].full, 0.0};
  out.divergence_defect = {e1 * pieces[11].full, 1.0};
  return out;
}

std::vector<SweepSeries> eps_sweep_slopes(const WeakWindow& window,
                                          std::span<const double> eps_list,
                                          std::span<const TestFunctionPair> pairs,
                                          const ModelParams& params) {
  if (eps_list.size() < 4) throw ConfigError("eps sweep needs at least 4 values");
  for (double e : eps_list) {
    if (!(e > 0.0) || !(e < 1.0)) throw ConfigError("eps sweep values must lie in (0, 1)");
  }
  const double ratio = eps_list[1] / eps_list[0];
  if (std::abs(ratio - 1.0) <= 1e-9) {
    throw ConfigError("eps sweep values must form a geometric progression");
  }
  for (size_t i = 1; i + 1 < eps_list.size(); ++i) {
    if (std::abs(eps_list[i + 1] / eps_list[i] / ratio - 1.0) > 1e-9) {
      throw ConfigError("eps sweep values must form a geometric progression");
    }
  }
  if (pairs.empty()) throw ConfigError("eps sweep needs at least one test pair");

  std::vector<SweepSeries> out;
  const std::span<const char* const> names = weak_term_names();
  for (const TestFunctionPair& pair : pairs) {
    std::vector<TermBreakdown> rows;
    rows.reserve(eps_list.size());
    for (double e : eps_list) rows.push_back(assemble_terms(window, pair, params, e));

    for (size_t t = 0; t < names.size(); ++t) {
      SweepSeries s;
      s.term = names[t];
      s.pair = pair.name;
      s.eps.assign(eps_list.begin(), eps_list.end());
      s.magnitude.reserve(rows.size());
      for (const TermBreakdown& b : rows) {
        const WeakTerm* terms[] = {&b.inertia_time,      &b.convection,
                                   &b.viscous,           &b.pressure,
                                   &b.structure_inertia, &b.structure_visco,
                                   &b.structure_bending, &b.force,
                                   &b.divergence_defect};
        s.magnitude.push_back(terms[t]->magnitude());
      }
      const WeakTerm* first[] = {&rows[0].inertia_time,      &rows[0].convection,
                                 &rows[0].viscous,           &rows[0].pressure,
                                 &rows[0].structure_inertia, &rows[0].structure_visco,
                                 &rows[0].structure_bending, &rows[0].force,
                                 &rows[0].divergence_defect};
      s.predicted_exponent = first[t]->predicted_exponent;
      s.fitted_slope = fit_loglog_slope(s.eps, s.magnitude, s.term, s.pair);
      out.push_back(std::move(s));
    }
  }
  return out;
}

LimitResidualReport limit_residual(const WeakWindow& window, const TestFunctionPair& pair,
                                   const ModelParams& params) {
  require_window_shape(window.times);
  require_matching_support(pair, window.times);

  const int m = window.steps();
  const int n = window.grid.n;
  const double dx = window.grid.dx();
  const double chi = params.chi() ? 1.0 : 0.0;

  std::vector<double> wall(m, 0.0), bend(m, 0.0), pres(m, 0.0), flux(m, 0.0), drift(m, 0.0);
  std::vector<double> x2(n), x2p(n), x2pp(n);
  for (int j = 0; j < n; ++j) {
    const double x = window.grid.node(j);
    x2[j] = pair.x2.eval(x);
    x2p[j] = pair.x2.d1(x);
    x2pp[j] = pair.x2.d2(x);
  }

  for (int k = 0; k < m; ++k) {
    const double bump = pair.bump(window.times[k]);
    const double bump_dt = pair.bump_dt(window.times[k]);
    const GridField& h = window.h[k];
    const GridField& p = window.p[k];
    const GridField& px = window.px[k];
    const GridField& phi = window.phi[k];

    double a_wall = 0.0, a_bend = 0.0, a_pres = 0.0, a_flux = 0.0, a_drift = 0.0;
    for (int j = 0; j < n; ++j) {
      const double h3 = h[j] * h[j] * h[j];
      a_wall += h[j] * x2pp[j];
      a_bend += window.hxx[k][j] * x2pp[j];
      a_pres += p[j] * x2[j];
      a_flux += h3 * (px[j] / 12.0 - phi[j]) * x2p[j];
      a_drift += h[j] * x2[j];
    }
    wall[k] = chi * params.delta * dx * a_wall * bump_dt;
    bend[k] = params.beta * dx * a_bend * bump;
    pres[k] = dx * a_pres * bump;
    flux[k] = dx * a_flux * bump;
    drift[k] = dx * a_drift * bump_dt;
  }

  const double dt = window.times[1] - window.times[0];
  const double s_wall = simpson_uniform(wall, dt);
  const double s_bend = simpson_uniform(bend, dt);
  const double s_pres = simpson_uniform(pres, dt);
  const double s_flux = simpson_uniform(flux, dt);
  const double s_drift = simpson_uniform(drift, dt);

  LimitResidualReport rep;
  rep.pressure_residual = std::abs(s_wall + s_bend - s_pres);
  rep.pressure_scale = std::max({std::abs(s_wall), std::abs(s_bend), std::abs(s_pres)});
  rep.reynolds_residual = std::abs(s_flux - s_drift);
  rep.reynolds_scale = std::max(std::abs(s_flux), std::abs(s_drift));
  return rep;
}

}  // namespace thinfilm
