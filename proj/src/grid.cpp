#include "thinfilm/grid.hpp"

namespace thinfilm {

PeriodicGrid build_grid(int n) {
  if (n < 8) throw ConfigError("grid too small: n = " + std::to_string(n) + ", need n >= 8");
  if (n % 2 != 0) throw ConfigError("grid size must be even, got n = " + std::to_string(n));
  return PeriodicGrid{n};
}

double min_value(const GridField& f) { return *std::min_element(f.v.begin(), f.v.end()); }

double max_value(const GridField& f) { return *std::max_element(f.v.begin(), f.v.end()); }

static void require_same_grid(const GridField& a, const GridField& b) {
  if (!(a.grid == b.grid)) throw NumericsError("grid mismatch in field arithmetic");
}

GridField operator+(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  GridField out = a;
  for (int j = 0; j < out.n(); ++j) out[j] += b[j];
  return out;
}

GridField operator-(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  GridField out = a;
  for (int j = 0; j < out.n(); ++j) out[j] -= b[j];
  return out;
}

GridField operator*(double s, const GridField& a) {
  GridField out = a;
  for (double& x : out.v) x *= s;
  return out;
}

GridField hadamard(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  GridField out = a;
  for (int j = 0; j < out.n(); ++j) out[j] *= b[j];
  return out;
}

}  // namespace thinfilm
