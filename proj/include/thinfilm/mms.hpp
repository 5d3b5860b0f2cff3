#pragma once

#include <span>
#include <string>
#include <vector>

#include "thinfilm/config.hpp"

namespace thinfilm {

// One rung of a convergence study.
struct StudyRow {
  std::string study;   // "temporal" | "spatial"
  std::string branch;  // temporal: "uncoupled" | "coupled"; spatial: "decay"
  std::string scheme;  // "be" | "bdf2"
  int n = 0;
  double dt = 0.0;
  int steps = 0;
  double error = 0.0;  // max-norm against the study's reference at the final time
  double order = 0.0;  // log2(previous error / error); 0 on the first rung
};

// Temporal accuracy against the manufactured decay
//
//   h(x, t) = 1 + a exp(-g t) sin(2 pi x)
//
// imposed exactly through a y-independent force f1 = -12 Phi. The flux the
// manufactured potential induces collapses to a single Fourier mode at the
// nodes, so the spatial machinery is exact to roundoff and the measured
// error is the time integrator's alone. Two branches: "uncoupled" evolves
// the explicit-rate equation, "coupled" the implicit-rate one (the wall
// term shifts Phi by a known cosine, nothing else changes). step_counts
// must be increasing; each rung runs t_end / steps as a fixed dt.
std::vector<StudyRow> temporal_study(Scheme scheme, std::span<const int> step_counts);

// Spatial self-convergence on nested grids against a fine reference run,
// same fixed dt everywhere, band-unlimited initial data exp(2 sin(2 pi x))
// decaying under the pure bending flux. Errors are compared at the common
// nodes, so the columns isolate the spatial truncation of the coarse grids.
// Every entry of grids must divide reference_n.
std::vector<StudyRow> spatial_study(std::span<const int> grids, int reference_n);

}  // namespace thinfilm
