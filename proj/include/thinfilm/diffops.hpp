#pragma once

#include <complex>
#include <span>
#include <vector>

#include "thinfilm/grid.hpp"

namespace thinfilm {

// k-th spectral derivative, k in 1..6. Mode 0 is annihilated for every k, so
// the result has exactly zero spectral mean; odd orders also zero the Nyquist
// mode, whose sawtooth carries no usable odd-derivative information.
GridField deriv_x(const GridField& f, int order);

// Periodic trapezoid rule: literally dx * sum of nodal values.
double mean_integral(const GridField& f);

// Conservative divergence of a nodal flux: first spectral derivative with the
// zero-mean guarantee spelled out in the name.
GridField flux_divergence(const GridField& flux);

// Orszag 2/3 rule: zero every mode with index above n/3.
GridField dealias_two_thirds(const GridField& f);

// Unnormalized half spectrum, bins m = 0 .. n/2; inverse_spectrum applies
// the 1/n normalization. inverse(forward(f)) returns f up to roundoff.
std::vector<std::complex<double>> forward_spectrum(const GridField& f);
GridField inverse_spectrum(std::span<const std::complex<double>> bins, PeriodicGrid grid);

// Gauss-Legendre rule on [0,1]. Nodes ascend, weights are positive and sum
// to 1; exact for polynomials through degree 2q-1.
struct Quadrature01 {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per q; q >= 2.
const Quadrature01& gauss_legendre01(int q);

// Integral over [0,1] of a function given by its samples at the q = size()
// Gauss-Legendre nodes.
double quad_unit_interval(std::span<const double> samples_at_gl_nodes);

// Row-major q*q matrix D with (D f)_i = derivative at nodes[i] of the
// Lagrange interpolant of f through the distinct nodes. Exact for
// polynomials of degree < q.
std::vector<double> lagrange_diff_matrix(std::span<const double> nodes);

}  // namespace thinfilm
