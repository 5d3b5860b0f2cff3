#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "support/oracles.hpp"
#include "thinfilm/diffops.hpp"

using namespace thinfilm;
using std::numbers::pi;

namespace {
constexpr double two_pi = 2.0 * pi;
// (2*pi)^6, frozen by hand, not by the code under test.
constexpr double two_pi_p6 = 61528.908388819473;

double sin_mode1(double x) { return std::sin(two_pi * x); }

double max_abs_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (int j = 0; j < a.n(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}
}  // namespace

TEST_CASE("grid arithmetic") {
  const PeriodicGrid g8 = build_grid(8);
  CHECK(g8.dx() == 0.125);
  CHECK(g8.node(3) == 0.375);
  const PeriodicGrid g256 = build_grid(256);
  CHECK(g256.dx() == 1.0 / 256.0);
  CHECK(g256.node(0) == 0.0);
}

TEST_CASE("derivatives of a constant vanish identically") {
  const PeriodicGrid g = build_grid(32);
  const GridField c = sample(g, [](double) { return 3.7; });
  for (int order = 1; order <= 6; ++order) {
    const GridField d = deriv_x(c, order);
    for (int j = 0; j < g.n; ++j) CHECK(std::abs(d[j]) <= 64 * std::numeric_limits<double>::epsilon() * std::pow(pi * g.n, order));
  }
}

TEST_CASE("derivatives of a single mode match the analytic cycle") {
  const PeriodicGrid g = build_grid(64);
  const GridField f = sample(g, sin_mode1);
  for (int order = 1; order <= 6; ++order) {
    const GridField d = deriv_x(f, order);
    const double k = std::pow(two_pi, order);
    // roundoff floor: FFT noise in the top bin amplified by (pi*n)^order
    const double tol = 32.0 * std::numeric_limits<double>::epsilon() * std::pow(pi * g.n, order);
    const GridField expect = sample(g, [&](double x) {
      switch (order % 4) {
        case 1:
          return k * std::cos(two_pi * x);
        case 2:
          return -k * std::sin(two_pi * x);
        case 3:
          return -k * std::cos(two_pi * x);
        default:
          return k * std::sin(two_pi * x);
      }
    });
    CHECK(max_abs_diff(d, expect) <= tol);
  }
}

TEST_CASE("sixth derivative of sin agrees with the finite-difference oracle") {
  const PeriodicGrid g = build_grid(64);
  const GridField d6 = deriv_x(sample(g, sin_mode1), 6);

  // Frozen closed form; 0.05 absolute confirms every digit of 61528.9 and
  // sits an order above the spectral roundoff floor at this n.
  for (int j = 0; j < g.n; ++j) {
    CHECK(std::abs(d6[j] - (-two_pi_p6 * std::sin(two_pi * g.node(j)))) <= 0.05);
  }

  // Independent route: Richardson-extrapolated differences. The h^-6 rounding
  // amplification leaves a noise floor of a few absolute units, hence the
  // looser tolerance here.
  for (int j = 0; j < g.n; j += 7) {
    const double fd = oracle::richardson_diff(sin_mode1, g.node(j), 1.0 / 128.0, 6);
    CHECK(std::abs(d6[j] - fd) <= 1e-3 * two_pi_p6);
  }
}

TEST_CASE("spectral accuracy on a band-unlimited profile") {
  auto f = [](double x) { return std::exp(std::sin(two_pi * x)); };
  auto df = [](double x) { return two_pi * std::cos(two_pi * x) * std::exp(std::sin(two_pi * x)); };
  double err[3];
  int idx = 0;
  for (int n : {16, 32, 64}) {
    const PeriodicGrid g = build_grid(n);
    const GridField d = deriv_x(sample(g, f), 1);
    double e = 0.0;
    for (int j = 0; j < n; ++j) e = std::max(e, std::abs(d[j] - df(g.node(j))));
    err[idx++] = e;
  }
  CHECK(err[0] / err[2] >= 1e4);  // at least four orders from n=16 to n=64
  CHECK(err[2] <= 1e-9);
}

TEST_CASE("deriv_x is linear") {
  const PeriodicGrid g = build_grid(48);
  const GridField f = sample(g, [](double x) { return std::exp(std::cos(two_pi * x)); });
  const GridField h = sample(g, [](double x) { return std::sin(two_pi * 2.0 * x) + 0.3 * std::cos(two_pi * x); });
  for (int order : {1, 3, 6}) {
    const GridField lhs = deriv_x(1.75 * f + (-0.5) * h, order);
    const GridField rhs = 1.75 * deriv_x(f, order) + (-0.5) * deriv_x(h, order);
    // the two routes round differently at the top bins, so compare against
    // the amplified-noise floor rather than the derivative's own scale
    const double tol = 32.0 * std::numeric_limits<double>::epsilon() * std::pow(pi * g.n, order) * 10.0;
    CHECK(max_abs_diff(lhs, rhs) <= tol);
  }
}

TEST_CASE("derivative composition collapses to the summed order") {
  const PeriodicGrid g = build_grid(64);
  const GridField f = sample(g, [](double x) {
    return std::sin(two_pi * x) + 0.4 * std::cos(two_pi * 3.0 * x) + 0.1 * std::sin(two_pi * 5.0 * x);
  });
  const GridField once = deriv_x(f, 5);
  const GridField twice = deriv_x(deriv_x(f, 2), 3);
  double scale = 0.0;
  for (int j = 0; j < g.n; ++j) scale = std::max(scale, std::abs(once[j]));
  CHECK(max_abs_diff(once, twice) <= 1e-13 * scale);
}

TEST_CASE("odd orders annihilate the Nyquist sawtooth, even orders keep it") {
  const PeriodicGrid g = build_grid(32);
  GridField saw(g);
  for (int j = 0; j < g.n; ++j) saw[j] = (j % 2 == 0) ? 1.0 : -1.0;

  const GridField d1 = deriv_x(saw, 1);
  for (int j = 0; j < g.n; ++j) CHECK(d1[j] == 0.0);

  const double k2 = std::pow(pi * g.n, 2.0);
  const GridField d2 = deriv_x(saw, 2);
  for (int j = 0; j < g.n; ++j) CHECK(d2[j] == doctest::Approx(-k2 * saw[j]).epsilon(1e-12));
}

TEST_CASE("derivatives have exactly representable zero mean") {
  const PeriodicGrid g = build_grid(96);
  const GridField f = sample(g, [](double x) { return std::exp(std::sin(two_pi * x)) + 2.0; });
  for (int order = 1; order <= 6; ++order) {
    const GridField d = deriv_x(f, order);
    double scale = 0.0;
    for (int j = 0; j < g.n; ++j) scale = std::max(scale, std::abs(d[j]));
    CHECK(std::abs(mean_integral(d)) <= 1e-14 * std::max(1.0, scale));
  }
}

TEST_CASE("derivative-quadrature duality") {
  const PeriodicGrid g = build_grid(64);
  const GridField f = sample(g, [](double x) { return 1.0 + 0.5 * std::sin(two_pi * x) + 0.2 * std::cos(two_pi * 4.0 * x); });
  const GridField h = sample(g, [](double x) { return std::cos(two_pi * 2.0 * x) - 0.7 * std::sin(two_pi * 3.0 * x); });
  const double lhs = mean_integral(hadamard(f, deriv_x(h, 1)));
  const double rhs = -mean_integral(hadamard(deriv_x(f, 1), h));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("mean_integral is literally dx times the nodal sum") {
  const PeriodicGrid g = build_grid(64);
  const GridField f = sample(g, [](double x) { return 1.0 + 0.5 * std::sin(two_pi * x); });
  double s = 0.0;
  for (int j = 0; j < g.n; ++j) s += f[j];
  CHECK(mean_integral(f) == g.dx() * s);  // bitwise
  CHECK(mean_integral(f) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mean_integral(sample(g, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(mean_integral(sample(g, sin_mode1))) <= 1e-15);

  // refined-grid cross-check on a band-unlimited integrand
  const PeriodicGrid g2 = build_grid(64);
  const GridField e = sample(g2, [](double x) { return std::exp(std::sin(two_pi * x)); });
  const double ref = oracle::simpson([](double x) { return std::exp(std::sin(two_pi * x)); }, 0.0, 1.0, 1 << 14);
  CHECK(mean_integral(e) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("flux divergence conserves mass") {
  const PeriodicGrid g = build_grid(128);
  const GridField h = sample(g, [](double x) { return 1.0 + 0.3 * std::sin(two_pi * x); });
  const GridField flux = hadamard(hadamard(h, hadamard(h, h)), deriv_x(h, 5));
  const GridField div = flux_divergence(flux);
  double scale = 0.0;
  for (int j = 0; j < g.n; ++j) scale = std::max(scale, std::abs(div[j]));
  CHECK(std::abs(mean_integral(div)) <= 1e-14 * scale);
}

TEST_CASE("2/3 dealiasing masks exactly the top third") {
  const PeriodicGrid g = build_grid(60);  // cutoff n/3 = 20
  const GridField keep = sample(g, [](double x) { return std::cos(two_pi * 20.0 * x); });
  const GridField kill = sample(g, [](double x) { return std::sin(two_pi * 21.0 * x); });
  const GridField masked_keep = dealias_two_thirds(keep);
  const GridField masked_kill = dealias_two_thirds(kill);
  CHECK(max_abs_diff(masked_keep, keep) <= 1e-13);
  for (int j = 0; j < g.n; ++j) CHECK(std::abs(masked_kill[j]) <= 1e-13);
  // idempotent
  CHECK(max_abs_diff(dealias_two_thirds(masked_keep), masked_keep) <= 1e-14);
}

TEST_CASE("grid construction rejects unusable sizes") {
  CHECK_THROWS_WITH_AS(static_cast<void>(build_grid(7)), "grid too small: n = 7, need n >= 8", ConfigError);
  CHECK_THROWS_AS(static_cast<void>(build_grid(9)), ConfigError);
  const PeriodicGrid g = build_grid(16);
  const GridField f = sample(g, sin_mode1);
  CHECK_THROWS_AS(static_cast<void>(deriv_x(f, 0)), NumericsError);
  CHECK_THROWS_AS(static_cast<void>(deriv_x(f, 7)), NumericsError);
}

TEST_CASE("Gauss-Legendre rule on the unit interval") {
  for (int q : {2, 3, 4, 5, 8, 12, 16}) {
    const Quadrature01& rule = gauss_legendre01(q);
    REQUIRE(static_cast<int>(rule.nodes.size()) == q);
    double wsum = 0.0;
    for (int i = 0; i < q; ++i) {
      CHECK(rule.nodes[i] > 0.0);
      CHECK(rule.nodes[i] < 1.0);
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      CHECK(rule.weights[i] > 0.0);
      wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
    // symmetric rule: mirrored nodes sum to 1, mirrored weights are identical
    for (int i = 0; i < q / 2; ++i) {
      CHECK(std::abs(rule.nodes[i] + rule.nodes[q - 1 - i] - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
      CHECK(rule.weights[i] == rule.weights[q - 1 - i]);
    }

    // exactness through degree 2q-1
    for (int d = 0; d <= 2 * q - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < q; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("quad_unit_interval worked values") {
  {
    const Quadrature01& rule = gauss_legendre01(2);
    const double s = quad_unit_interval(std::span<const double>(rule.nodes));  // integrand y -> y
    CHECK(std::abs(s - 0.5) <= 4 * std::numeric_limits<double>::epsilon());
  }
  {
    const Quadrature01& rule = gauss_legendre01(4);
    std::vector<double> ones(4, 1.0);
    CHECK(quad_unit_interval(ones) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> par(4);
    for (int i = 0; i < 4; ++i) par[i] = rule.nodes[i] * (rule.nodes[i] - 1.0);
    CHECK(quad_unit_interval(par) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  }
  {
    const Quadrature01& rule = gauss_legendre01(8);
    std::vector<double> samples(8);
    for (int i = 0; i < 8; ++i) samples[i] = std::exp(rule.nodes[i]);
    const double s = quad_unit_interval(samples);
    CHECK(std::abs(s - (std::exp(1.0) - 1.0)) <= 1e-12);
  }
  std::vector<double> one_sample = {1.0};
  CHECK_THROWS_AS(static_cast<void>(quad_unit_interval(one_sample)), ConfigError);
}

TEST_CASE("lagrange_diff_matrix differentiates polynomial node data exactly") {
  const Quadrature01& rule = gauss_legendre01(6);
  const std::vector<double> d = lagrange_diff_matrix(rule.nodes);
  REQUIRE(d.size() == 36);

  // f = y^3 - 0.5 y^2 + 2 y, f' = 3 y^2 - y + 2, exact for degree < 6
  std::vector<double> f(6), expect(6);
  for (int i = 0; i < 6; ++i) {
    const double y = rule.nodes[i];
    f[i] = y * y * y - 0.5 * y * y + 2.0 * y;
    expect[i] = 3.0 * y * y - y + 2.0;
  }
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += d[static_cast<size_t>(i) * 6 + k] * f[k];
    CHECK(std::abs(s - expect[i]) <= 1e-12);
  }

  // constants are annihilated: rows sum to zero
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += d[static_cast<size_t>(i) * 6 + k];
    CHECK(std::abs(s) <= 1e-11);
  }

  const std::vector<double> dup = {0.1, 0.5, 0.5, 0.9};
  CHECK_THROWS_AS(static_cast<void>(lagrange_diff_matrix(dup)), ConfigError);
  const std::vector<double> empty;
  CHECK_THROWS_AS(static_cast<void>(lagrange_diff_matrix(empty)), ConfigError);
}
