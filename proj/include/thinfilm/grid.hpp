#pragma once

#include <algorithm>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

// Uniform periodic grid on [0,1): nodes x_j = j/n, the right endpoint is
// identified with x = 0.
struct PeriodicGrid {
  int n = 0;

  double dx() const { return 1.0 / n; }
  double node(int j) const { return static_cast<double>(j) / n; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;
};

// n must be even (the real transform pairs +-m modes) and large enough that a
// sixth derivative is representable.
PeriodicGrid build_grid(int n);

// Nodal scalar field. Plain value type: copy and move freely.
struct GridField {
  PeriodicGrid grid;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(PeriodicGrid g, double fill = 0.0) : grid(g), v(static_cast<size_t>(g.n), fill) {}

  int n() const { return grid.n; }
  double& operator[](int j) { return v[static_cast<size_t>(j)]; }
  const double& operator[](int j) const { return v[static_cast<size_t>(j)]; }
};

template <class F>
GridField sample(PeriodicGrid g, F&& f) {
  GridField out(g);
  for (int j = 0; j < g.n; ++j) out[j] = f(g.node(j));
  return out;
}

double min_value(const GridField& f);
double max_value(const GridField& f);

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);

// Pointwise product.
GridField hadamard(const GridField& a, const GridField& b);

}  // namespace thinfilm
