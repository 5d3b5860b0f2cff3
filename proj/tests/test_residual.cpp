#include "thinfilm/residual.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/diffops.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/solver.hpp"

using namespace thinfilm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelParams params_r(double r) {
  ModelParams prm;
  prm.r = r;
  return prm;  // beta = delta = 12, rho = 1, zero forcing
}

// Snapshot sequence with prescribed height and height-rate profiles; the
// window builder derives everything else from these.
Trajectory synthetic_trajectory(PeriodicGrid g, int m, double t_end,
                                const std::function<double(double, double)>& hfun,
                                const std::function<double(double, double)>& wfun) {
  Trajectory traj;
  traj.snapshots.resize(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double t = t_end * k / (m - 1);
    Snapshot& s = traj.snapshots[static_cast<size_t>(k)];
    s.state.t = t;
    s.state.h = sample(g, [&](double x) { return hfun(x, t); });
    s.w = sample(g, [&](double x) { return wfun(x, t); });
  }
  return traj;
}

double mixed_profile(double x) {
  return 0.2 * std::cos(kTwoPi * x) + 0.12 * std::sin(kTwoPi * x);
}

// Time-frozen fields: h never moves, w = 0.
Trajectory steady_trajectory(PeriodicGrid g, int m, double t_end) {
  return synthetic_trajectory(
      g, m, t_end, [](double x, double) { return 1.0 + mixed_profile(x); },
      [](double, double) { return 0.0; });
}

// Every weak-form term is genuinely nonzero on this window: the height moves
// in time with a nonconstant rate and the force density mixes parities in
// both x and y.
Trajectory moving_trajectory(PeriodicGrid g, int m, double t_end) {
  return synthetic_trajectory(
      g, m, t_end,
      [=](double x, double t) {
        const double s = t / t_end;
        return 1.0 + mixed_profile(x) * (1.0 - 0.3 * s - 0.2 * s * s);
      },
      [=](double x, double t) {
        const double s = t / t_end;
        return mixed_profile(x) * (-0.3 - 0.4 * s) / t_end;
      });
}

ModelParams forced_params(double r, double t_end, int quad_order) {
  ModelParams prm = params_r(r);
  prm.forcing = make_forcing_spec(
      Expr::parse("(0.5+0.25*cos(2*pi*x)+0.2*sin(4*pi*x))*(1+y)", "xyt"), std::nullopt, t_end,
      quad_order);
  return prm;
}

const WeakTerm& term_by_name(const TermBreakdown& b, const std::string& name) {
  if (name == "inertia_time") return b.inertia_time;
  if (name == "convection") return b.convection;
  if (name == "viscous") return b.viscous;
  if (name == "pressure") return b.pressure;
  if (name == "structure_inertia") return b.structure_inertia;
  if (name == "structure_visco") return b.structure_visco;
  if (name == "structure_bending") return b.structure_bending;
  if (name == "force") return b.force;
  return b.divergence_defect;
}

}  // namespace

TEST_CASE("trig and y polynomial factors differentiate correctly") {
  const TrigPoly tp{0.3, {0.7, -0.2}, {0.4, 0.1}};
  auto f = [&](double x) { return tp.eval(x); };
  for (double x : {0.13, 0.4, 0.77}) {
    CHECK(std::abs(tp.d1(x) - oracle::central_diff(f, x, 1e-5, 1)) <= 1e-6);
    CHECK(std::abs(tp.d2(x) - oracle::central_diff(f, x, 1e-4, 2)) <= 1e-4);
  }
  CHECK(tp.eval(0.25) == doctest::Approx(0.3 + 0.7 * std::cos(kTwoPi * 0.25) -
                                         0.2 * std::cos(2 * kTwoPi * 0.25) +
                                         0.4 * std::sin(kTwoPi * 0.25) +
                                         0.1 * std::sin(2 * kTwoPi * 0.25))
                             .epsilon(1e-14));

  const YPoly yp{{0.2, -1.0, 0.5, 2.0}};
  auto g = [&](double y) { return yp.eval(y); };
  CHECK(yp.eval(0.5) == doctest::Approx(0.2 - 0.5 + 0.125 + 0.25).epsilon(1e-14));
  for (double y : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(yp.d1(y) - oracle::central_diff(g, y, 1e-6, 1)) <= 1e-7);
  }
  CHECK(YPoly{}.eval(0.7) == 0.0);
  CHECK(YPoly{{3.0}}.d1(0.7) == 0.0);
}

TEST_CASE("bundled test pairs satisfy the wall, trace, and bump constraints") {
  const double t0 = 0.25;
  const double duration = 0.5;
  const std::vector<TestFunctionPair> pairs = bundled_test_pairs(t0, duration);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].name == "A");
  CHECK(pairs[1].name == "B");
  CHECK(pairs[2].name == "C");

  const Quadrature01& rule = gauss_legendre01(16);
  for (const TestFunctionPair& p : pairs) {
    // no-slip factor at the walls, exact trace factor at the top wall
    CHECK(p.y1.eval(0.0) == 0.0);
    CHECK(p.y1.eval(1.0) == 0.0);
    CHECK(p.y2.eval(0.0) == 0.0);
    CHECK(p.y2.eval(1.0) == 1.0);

    // bump vanishes at both window ends and peaks mid-window
    CHECK(p.bump(t0) == 0.0);
    CHECK(p.bump_dt(t0) == 0.0);
    CHECK(p.bump(t0 + 0.5 * duration) == 1.0);
    CHECK(p.bump(t0 + duration) <= 1e-30);

    // the wall-pressure pairing needs psi with first-mode content
    const bool mode1 = (!p.x2.a.empty() && p.x2.a[0] != 0.0) ||
                       (!p.x2.b.empty() && p.x2.b[0] != 0.0);
    CHECK(mode1);

    // a potential-free force profile is orthogonal to y(1-y); every bundled
    // vertical factor must keep a nonzero pairing with such profiles
    double against_odd = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double y = rule.nodes[static_cast<size_t>(i)];
      against_odd += rule.weights[static_cast<size_t>(i)] * p.y1.eval(y) * (1.0 - 2.0 * y);
    }
    CHECK(std::abs(against_odd) >= 0.01);
  }

  CHECK_THROWS_AS(static_cast<void>(bundled_test_pairs(0.0, 0.0)), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(bundled_test_pairs(0.0, -1.0)), ConfigError);
}

TEST_CASE("rescaled gradient reduces to the plain gradient on a flat unit film") {
  const PeriodicGrid g = build_grid(32);
  const Quadrature01& rule = gauss_legendre01(8);
  PlaneField f(g, rule.nodes);
  for (int j = 0; j < 32; ++j) {
    for (int i = 0; i < 8; ++i) {
      f.at(j, i) = std::sin(kTwoPi * g.node(j)) * rule.nodes[static_cast<size_t>(i)] *
                   rule.nodes[static_cast<size_t>(i)];
    }
  }
  const GridField h(g, 1.0);

  const PlaneGradient grad = rescaled_gradient(f, h, 1.0);
  for (int j = 0; j < 32; ++j) {
    const double x = g.node(j);
    for (int i = 0; i < 8; ++i) {
      const double y = rule.nodes[static_cast<size_t>(i)];
      CHECK(std::abs(grad.horizontal.at(j, i) - kTwoPi * std::cos(kTwoPi * x) * y * y) <= 1e-10);
      CHECK(std::abs(grad.vertical.at(j, i) - 2.0 * y * std::sin(kTwoPi * x)) <= 1e-11);
    }
  }

  // halving eps exactly doubles the vertical component
  const PlaneGradient half = rescaled_gradient(f, h, 0.5);
  for (size_t m = 0; m < half.vertical.v.size(); ++m) {
    CHECK(half.vertical.v[m] == 2.0 * grad.vertical.v[m]);
    CHECK(half.horizontal.v[m] == grad.horizontal.v[m]);
  }
}

TEST_CASE("rescaled gradient applies the film tilt and rejects unusable inputs") {
  const PeriodicGrid g = build_grid(32);
  const Quadrature01& rule = gauss_legendre01(8);
  const GridField h = sample(g, [](double x) { return 1.0 + 0.2 * std::sin(kTwoPi * x); });

  // x-independent data: the whole horizontal part is the tilt correction
  PlaneField f(g, rule.nodes);
  for (int j = 0; j < 32; ++j) {
    for (int i = 0; i < 8; ++i) {
      f.at(j, i) = rule.nodes[static_cast<size_t>(i)] * rule.nodes[static_cast<size_t>(i)];
    }
  }
  const double eps = 0.25;
  const PlaneGradient grad = rescaled_gradient(f, h, eps);
  for (int j = 0; j < 32; ++j) {
    const double x = g.node(j);
    const double hx = 0.2 * kTwoPi * std::cos(kTwoPi * x);
    for (int i = 0; i < 8; ++i) {
      const double y = rule.nodes[static_cast<size_t>(i)];
      CHECK(std::abs(grad.horizontal.at(j, i) + y * (hx / h[j]) * 2.0 * y) <= 1e-10);
      CHECK(std::abs(grad.vertical.at(j, i) - 2.0 * y / (eps * h[j])) <= 1e-11);
    }
  }

  CHECK_THROWS_AS(static_cast<void>(rescaled_gradient(f, h, 0.0)), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(rescaled_gradient(f, h, -1.0)), ConfigError);

  const std::vector<double> one_node = {0.5};
  PlaneField thin(g, one_node);
  CHECK_THROWS_AS(static_cast<void>(rescaled_gradient(thin, h, 0.5)), ConfigError);

  const GridField wrong_grid(build_grid(16), 1.0);
  CHECK_THROWS_AS(static_cast<void>(rescaled_gradient(f, wrong_grid, 0.5)), NumericsError);

  GridField pinched = h;
  pinched[3] = 0.0;
  CHECK_THROWS_AS(static_cast<void>(rescaled_gradient(f, pinched, 0.5)), NumericsError);
}

TEST_CASE("an all-zero window produces an exactly zero breakdown") {
  const PeriodicGrid g = build_grid(8);
  const Quadrature01& rule = gauss_legendre01(4);
  const double t_end = 1e-3;

  WeakWindow win;
  win.grid = g;
  win.y = rule.nodes;
  win.yw = rule.weights;
  for (int k = 0; k < 5; ++k) {
    win.times.push_back(t_end * k / 4.0);
    win.h.emplace_back(g, 1.0);
    win.w.emplace_back(g);
    win.p.emplace_back(g);
    win.px.emplace_back(g);
    win.hx.emplace_back(g);
    win.hxx.emplace_back(g);
    win.phi.emplace_back(g);
    win.v1.emplace_back(g, rule.nodes);
    win.dv1.emplace_back(g, rule.nodes);
    win.v1y.emplace_back(g, rule.nodes);
    win.f1.emplace_back(g, rule.nodes);
  }

  const ModelParams prm = params_r(2.0);
  const TestFunctionPair pair = bundled_test_pairs(0.0, t_end)[0];
  const TermBreakdown b = assemble_terms(win, pair, prm, 0.25);
  CHECK(b.inertia_time.value == 0.0);
  CHECK(b.convection.value == 0.0);
  CHECK(b.viscous.value == 0.0);
  CHECK(b.pressure.value == 0.0);
  CHECK(b.structure_inertia.value == 0.0);
  CHECK(b.structure_visco.value == 0.0);
  CHECK(b.structure_bending.value == 0.0);
  CHECK(b.force.value == 0.0);
  CHECK(b.divergence_defect.value == 0.0);
  CHECK(b.weak_sum() == 0.0);

  const LimitResidualReport rep = limit_residual(win, pair, prm);
  CHECK(rep.pressure_residual == 0.0);
  CHECK(rep.pressure_scale == 0.0);
  CHECK(rep.reynolds_residual <= 1e-12);
}

TEST_CASE("a frozen window closes the pressure pairing against bending") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const Trajectory traj = steady_trajectory(g, 21, t_end);

  for (double r : {2.0, 3.0}) {
    const ModelParams prm = params_r(r);
    const WeakWindow win = build_weak_window(traj, prm, 8);
    CHECK(win.steps() == 21);

    for (const TestFunctionPair& pair : bundled_test_pairs(0.0, t_end)) {
      const LimitResidualReport rep = limit_residual(win, pair, prm);
      CHECK(rep.pressure_scale > 0.0);
      CHECK(rep.pressure_residual <= 1e-8 * rep.pressure_scale);
    }
  }
}

TEST_CASE("the eps^2-scaled weak sum shrinks linearly on a frozen window") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const ModelParams prm = params_r(2.0);
  const WeakWindow win = build_weak_window(steady_trajectory(g, 21, t_end), prm, 8);

  for (const TestFunctionPair& pair : bundled_test_pairs(0.0, t_end)) {
    const double coarse = std::abs(assemble_terms(win, pair, prm, 1.0 / 32).weak_sum()) /
                          (32.0 * 32.0);
    const double fine = std::abs(assemble_terms(win, pair, prm, 1.0 / 64).weak_sum()) /
                        (64.0 * 64.0);
    CHECK(coarse > 0.0);
    const double ratio = fine / coarse;
    CHECK(ratio >= 0.48);
    CHECK(ratio <= 0.52);
  }
}

TEST_CASE("halving the snapshot cadence flags an unresolved window") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const ModelParams prm = params_r(2.0);
  const TestFunctionPair pair = bundled_test_pairs(0.0, t_end)[0];

  // five snapshots cannot resolve the bump: the stride-2 rule sees only its
  // peak and reports 2T/3 instead of T/2
  const WeakWindow coarse = build_weak_window(steady_trajectory(g, 5, t_end), prm, 8);
  try {
    static_cast<void>(assemble_terms(coarse, pair, prm, 0.25));
    FAIL("expected the cadence guard to throw");
  } catch (const NumericsError& e) {
    CHECK(std::string(e.what()).find("cadence") != std::string::npos);
  }

  const WeakWindow fine = build_weak_window(steady_trajectory(g, 21, t_end), prm, 8);
  CHECK_NOTHROW(static_cast<void>(assemble_terms(fine, pair, prm, 0.25)));
}

TEST_CASE("pure terms scale by exact powers of two across a halved eps") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const Trajectory traj = moving_trajectory(g, 21, t_end);
  const TestFunctionPair pair = bundled_test_pairs(0.0, t_end)[1];

  const ModelParams prm = forced_params(2.0, t_end, 8);
  const WeakWindow win = build_weak_window(traj, prm, 8);
  const TermBreakdown b = assemble_terms(win, pair, prm, 1.0 / 64);
  const TermBreakdown bh = assemble_terms(win, pair, prm, 1.0 / 128);

  const struct {
    const char* name;
    double factor;  // magnitude(eps) / magnitude(eps/2) = 2^exponent
  } laws[] = {
      {"inertia_time", 64.0},      {"convection", 256.0}, {"structure_inertia", 16.0},
      {"structure_visco", 0.5},    {"structure_bending", 0.25},
      {"force", 1.0},              {"divergence_defect", 2.0},
  };
  for (const auto& law : laws) {
    const double num = term_by_name(b, law.name).magnitude();
    const double den = term_by_name(bh, law.name).magnitude();
    REQUIRE(den > 0.0);
    CHECK(std::abs(num / den / law.factor - 1.0) <= 0.05);
  }
  CHECK(term_by_name(b, "viscous").magnitude() > 0.0);
  CHECK(term_by_name(b, "pressure").magnitude() > 0.0);
}

TEST_CASE("the wall-rate exponent tracks the scaling parameter") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const Trajectory traj = moving_trajectory(g, 21, t_end);
  const TestFunctionPair pair = bundled_test_pairs(0.0, t_end)[0];

  for (const auto& [r, expected] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {3.0, -2.0}}) {
    const ModelParams prm = forced_params(r, t_end, 8);
    const WeakWindow win = build_weak_window(traj, prm, 8);
    const TermBreakdown b = assemble_terms(win, pair, prm, 0.125);
    CHECK(b.structure_visco.predicted_exponent == expected);
    CHECK(b.structure_visco.magnitude() > 0.0);
  }
}

TEST_CASE("slope fits recover the symbolic exponents on a synthetic window") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const ModelParams prm = forced_params(2.0, t_end, 8);
  const WeakWindow win = build_weak_window(moving_trajectory(g, 21, t_end), prm, 8);

  const std::vector<double> eps_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const std::vector<TestFunctionPair> pairs = bundled_test_pairs(0.0, t_end);
  const std::vector<SweepSeries> sweep = eps_sweep_slopes(win, eps_list, pairs, prm);
  REQUIRE(sweep.size() == 27);

  for (const SweepSeries& s : sweep) {
    CHECK(s.eps.size() == 5);
    CHECK(s.magnitude.size() == 5);
    CHECK_FALSE(s.term.empty());
    CHECK_FALSE(s.pair.empty());
    CHECK(std::abs(s.fitted_slope - s.predicted_exponent) <= 0.2);
    if (s.term != "viscous" && s.term != "pressure") {
      // single-power terms fit their exponent to rounding
      CHECK(std::abs(s.fitted_slope - s.predicted_exponent) <= 1e-6);
    }
  }
}

TEST_CASE("the eps sweep rejects unusable eps lists and degenerate terms") {
  const PeriodicGrid g = build_grid(32);
  const double t_end = 1e-3;
  const ModelParams prm = params_r(2.0);
  const WeakWindow win = build_weak_window(moving_trajectory(g, 21, t_end), prm, 8);
  const std::vector<TestFunctionPair> pairs = bundled_test_pairs(0.0, t_end);

  const std::vector<double> too_short = {0.5, 0.25, 0.125};
  CHECK_THROWS_AS(static_cast<void>(eps_sweep_slopes(win, too_short, pairs, prm)), ConfigError);
  const std::vector<double> closed_end = {1.0, 0.5, 0.25, 0.125};
  CHECK_THROWS_AS(static_cast<void>(eps_sweep_slopes(win, closed_end, pairs, prm)), ConfigError);
  const std::vector<double> not_geometric = {0.5, 0.25, 0.2, 0.1};
  CHECK_THROWS_AS(static_cast<void>(eps_sweep_slopes(win, not_geometric, pairs, prm)),
                  ConfigError);
  const std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(static_cast<void>(eps_sweep_slopes(win, flat, pairs, prm)), ConfigError);
  const std::vector<double> good = {0.5, 0.25, 0.125, 0.0625};
  const std::vector<TestFunctionPair> none;
  CHECK_THROWS_AS(static_cast<void>(eps_sweep_slopes(win, good, none, prm)), ConfigError);

  // without a force density the force term is identically zero: no slope
  try {
    static_cast<void>(eps_sweep_slopes(win, good, pairs, prm));
    FAIL("expected a degenerate-fit error");
  } catch (const NumericsError& e) {
    const std::string what = e.what();
    CHECK(what.find("degenerate") != std::string::npos);
    CHECK(what.find("force") != std::string::npos);
    CHECK(what.find("'A'") != std::string::npos);
  }
}

TEST_CASE("window assembly validates shape, spacing, heights, and eps") {
  const PeriodicGrid g = build_grid(16);
  const double t_end = 1e-3;
  const ModelParams prm = params_r(2.0);

  CHECK_THROWS_AS(static_cast<void>(build_weak_window(steady_trajectory(g, 4, t_end), prm, 4)),
                  ConfigError);
  CHECK_THROWS_AS(static_cast<void>(build_weak_window(steady_trajectory(g, 7, t_end), prm, 4)),
                  ConfigError);

  Trajectory skewed = steady_trajectory(g, 5, t_end);
  skewed.snapshots[3].state.t += 0.1 * t_end;
  CHECK_THROWS_AS(static_cast<void>(build_weak_window(skewed, prm, 4)), NumericsError);

  Trajectory pinched = steady_trajectory(g, 5, t_end);
  pinched.snapshots[2].state.h[1] = -0.2;
  CHECK_THROWS_AS(static_cast<void>(build_weak_window(pinched, prm, 4)), NumericsError);

  const WeakWindow win = build_weak_window(steady_trajectory(g, 21, t_end), prm, 4);
  const TestFunctionPair pair = bundled_test_pairs(0.0, t_end)[0];
  for (double bad_eps : {0.0, 1.0, 1.5, -0.25}) {
    CHECK_THROWS_AS(static_cast<void>(assemble_terms(win, pair, prm, bad_eps)), ConfigError);
  }

  const TestFunctionPair offset = bundled_test_pairs(0.0, 0.5 * t_end)[0];
  CHECK_THROWS_AS(static_cast<void>(assemble_terms(win, offset, prm, 0.25)), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(limit_residual(win, offset, prm)), ConfigError);
}

TEST_CASE("a short solver run feeds the window and closes the limit identities") {
  const double t_end = 4e-6;
  RunConfig config;
  config.grid = build_grid(32);
  config.params = forced_params(2.0, t_end, 8);
  config.initial.profile = Expr::parse("1+0.05*cos(2*pi*x)+0.03*sin(2*pi*x)", "x");
  config.dt0 = 5e-9;
  config.t_end = t_end;
  config.scheme = Scheme::BDF2;
  config.output_every = 8;

  const Trajectory traj = run(config);
  REQUIRE(traj.status == RunStatus::Completed);
  REQUIRE(traj.snapshots.size() == 101);

  const WeakWindow win = build_weak_window(traj, config.params, 8);
  CHECK(win.steps() == 101);
  CHECK(win.grid.n == 32);
  CHECK(win.y.size() == 8);

  // the stored pressure is the solver's own reconstruction, bit for bit
  for (int k : {0, 50, 100}) {
    const GridField p = pressure_of(win.h[static_cast<size_t>(k)], win.w[static_cast<size_t>(k)],
                                    config.params);
    for (int j = 0; j < 32; ++j) CHECK(win.p[static_cast<size_t>(k)][j] == p[j]);
  }
  const PlaneField v1 = limit_velocity(win.h[5], win.p[5], config.params.forcing, win.times[5],
                                       win.y);
  for (size_t m = 0; m < v1.v.size(); ++m) CHECK(win.v1[5].v[m] == v1.v[m]);

  const std::vector<TestFunctionPair> pairs = bundled_test_pairs(0.0, t_end);
  for (const TestFunctionPair& pair : pairs) {
    const LimitResidualReport rep = limit_residual(win, pair, config.params);
    CHECK(rep.pressure_scale > 0.0);
    CHECK(rep.reynolds_scale > 0.0);
    CHECK(rep.pressure_residual <= 1e-8 * rep.pressure_scale);
    CHECK(rep.reynolds_residual <= 1e-6 * rep.reynolds_scale);
  }

  const std::vector<double> eps_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  for (const SweepSeries& s : eps_sweep_slopes(win, eps_list, pairs, config.params)) {
    CHECK(std::abs(s.fitted_slope - s.predicted_exponent) <= 0.2);
  }
}
