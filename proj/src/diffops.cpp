#include "thinfilm/diffops.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace thinfilm {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is. Plans and
// buffers live in a per-thread cache, so a workspace is never shared between
// callers. FFTW_ESTIMATE keeps planning deterministic run to run.
std::mutex planner_mutex;

struct SpectralWorkspace {
  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd;
  fftw_plan bwd;

  explicit SpectralWorkspace(int n_) : n(n_) {
    real = fftw_alloc_real(static_cast<size_t>(n));
    spec = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    std::lock_guard<std::mutex> lock(planner_mutex);
    fwd = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
};

SpectralWorkspace& workspace_for(int n) {
  thread_local std::map<int, std::unique_ptr<SpectralWorkspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(n);
  return *slot;
}

int checked_size(const GridField& f) {
  const int n = f.grid.n;
  if (n < 2 || n % 2 != 0) throw NumericsError("spectral kernel requires an even grid size");
  if (static_cast<int>(f.v.size()) != n) throw NumericsError("field size does not match its grid");
  return n;
}

}  // namespace

GridField deriv_x(const GridField& f, int order) {
  if (order < 1 || order > 6) {
    throw NumericsError("derivative order must lie in 1..6, got " + std::to_string(order));
  }
  const int n = checked_size(f);
  auto& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);

  const double inv_n = 1.0 / n;
  const int nh = n / 2;
  const bool odd = (order % 2 != 0);
  // i^order: +i, -1, -i, +1 cycling with order mod 4.
  const double sign = (order % 4 == 1 || order % 4 == 0) ? 1.0 : -1.0;

  ws.spec[0][0] = 0.0;
  ws.spec[0][1] = 0.0;
  for (int m = 1; m <= nh; ++m) {
    const double k = 2.0 * std::numbers::pi * m;
    const double factor = sign * std::pow(k, order) * inv_n;
    const double re = ws.spec[m][0];
    const double im = ws.spec[m][1];
    if (odd) {
      if (m == nh) {
        ws.spec[m][0] = 0.0;
        ws.spec[m][1] = 0.0;
      } else {
        ws.spec[m][0] = -factor * im;
        ws.spec[m][1] = factor * re;
      }
    } else {
      ws.spec[m][0] = factor * re;
      ws.spec[m][1] = factor * im;
    }
  }

  fftw_execute(ws.bwd);
  GridField out(f.grid);
  std::copy(ws.real, ws.real + n, out.v.begin());
  return out;
}

double mean_integral(const GridField& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return f.grid.dx() * s;
}

GridField flux_divergence(const GridField& flux) { return deriv_x(flux, 1); }

std::vector<std::complex<double>> forward_spectrum(const GridField& f) {
  const int n = checked_size(f);
  auto& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);
  std::vector<std::complex<double>> bins(static_cast<size_t>(n / 2 + 1));
  for (int m = 0; m <= n / 2; ++m) bins[static_cast<size_t>(m)] = {ws.spec[m][0], ws.spec[m][1]};
  return bins;
}

GridField inverse_spectrum(std::span<const std::complex<double>> bins, PeriodicGrid grid) {
  const int n = grid.n;
  if (n < 2 || n % 2 != 0) throw NumericsError("spectral kernel requires an even grid size");
  if (static_cast<int>(bins.size()) != n / 2 + 1) {
    throw NumericsError("spectrum size does not match the grid");
  }
  auto& ws = workspace_for(n);
  const double inv_n = 1.0 / n;
  for (int m = 0; m <= n / 2; ++m) {
    ws.spec[m][0] = bins[static_cast<size_t>(m)].real() * inv_n;
    ws.spec[m][1] = bins[static_cast<size_t>(m)].imag() * inv_n;
  }
  fftw_execute(ws.bwd);
  GridField out(grid);
  std::copy(ws.real, ws.real + n, out.v.begin());
  return out;
}

GridField dealias_two_thirds(const GridField& f) {
  const int n = checked_size(f);
  auto& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);

  const double inv_n = 1.0 / n;
  const int nh = n / 2;
  const int cutoff = n / 3;
  for (int m = 0; m <= nh; ++m) {
    if (m > cutoff) {
      ws.spec[m][0] = 0.0;
      ws.spec[m][1] = 0.0;
    } else {
      ws.spec[m][0] *= inv_n;
      ws.spec[m][1] *= inv_n;
    }
  }

  fftw_execute(ws.bwd);
  GridField out(f.grid);
  std::copy(ws.real, ws.real + n, out.v.begin());
  return out;
}

namespace {

// Newton iteration on the Legendre recurrence, roots mirrored in pairs so the
// rule is symmetric by construction.
Quadrature01 make_gauss_legendre01(int q) {
  std::vector<double> x(static_cast<size_t>(q));  // on [-1,1], ascending
  std::vector<double> w(static_cast<size_t>(q));
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    if (q % 2 == 1 && i == half - 1) z = 0.0;
    double pp = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = q * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    {
      // one clean evaluation of P'_q at the converged root for the weight
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = q * (z * p1 - p0) / (z * z - 1.0);
    }
    const double weight = 2.0 / ((1.0 - z * z) * pp * pp);
    x[static_cast<size_t>(q - 1 - i)] = z;
    x[static_cast<size_t>(i)] = -z;
    w[static_cast<size_t>(q - 1 - i)] = weight;
    w[static_cast<size_t>(i)] = weight;
  }

  Quadrature01 rule;
  rule.nodes.resize(static_cast<size_t>(q));
  rule.weights.resize(static_cast<size_t>(q));
  for (int i = 0; i < q; ++i) {
    rule.nodes[static_cast<size_t>(i)] = 0.5 * (1.0 + x[static_cast<size_t>(i)]);
    rule.weights[static_cast<size_t>(i)] = 0.5 * w[static_cast<size_t>(i)];
  }
  return rule;
}

}  // namespace

const Quadrature01& gauss_legendre01(int q) {
  if (q < 2) throw ConfigError("Gauss-Legendre rule needs at least 2 points, got " + std::to_string(q));
  static std::mutex cache_mutex;
  static std::map<int, Quadrature01> cache;  // node/map references stay valid across inserts
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, make_gauss_legendre01(q)).first;
  return it->second;
}

double quad_unit_interval(std::span<const double> samples_at_gl_nodes) {
  const int q = static_cast<int>(samples_at_gl_nodes.size());
  const Quadrature01& rule = gauss_legendre01(q);
  double s = 0.0;
  for (int i = 0; i < q; ++i) s += rule.weights[static_cast<size_t>(i)] * samples_at_gl_nodes[static_cast<size_t>(i)];
  return s;
}

std::vector<double> lagrange_diff_matrix(std::span<const double> nodes) {
  const size_t q = nodes.size();
  if (q == 0) throw ConfigError("differentiation matrix needs at least one node");
  for (size_t i = 0; i < q; ++i) {
    for (size_t k = i + 1; k < q; ++k) {
      if (nodes[i] == nodes[k]) throw ConfigError("differentiation matrix needs distinct nodes");
    }
  }
  std::vector<double> bary(q, 1.0);
  for (size_t i = 0; i < q; ++i) {
    for (size_t k = 0; k < q; ++k) {
      if (k != i) bary[i] /= nodes[i] - nodes[k];
    }
  }
  std::vector<double> d(q * q, 0.0);
  for (size_t i = 0; i < q; ++i) {
    double diag = 0.0;
    for (size_t k = 0; k < q; ++k) {
      if (k == i) continue;
      const double entry = (bary[k] / bary[i]) / (nodes[i] - nodes[k]);
      d[i * q + k] = entry;
      diag -= entry;
    }
    d[i * q + i] = diag;
  }
  return d;
}

}  // namespace thinfilm
