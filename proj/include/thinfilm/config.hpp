#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "thinfilm/expr.hpp"
#include "thinfilm/forcing.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/params.hpp"

namespace thinfilm {

enum class Scheme { BE, BDF2 };

std::string scheme_name(Scheme s);

// Initial height profile: either a closed-form expression in x or a table of
// nodal values (exactly one of the two is set).
struct InitialSpec {
  Expr profile;
  std::vector<double> table;
};

struct RunConfig {
  PeriodicGrid grid;
  ModelParams params;  // carries the forcing
  InitialSpec initial;
  double dt0 = 0.0;    // 0 = derive from the initial profile at run start
  double t_end = 0.0;
  Scheme scheme = Scheme::BDF2;
  int output_every = 1;
};

// Sectioned key = value text:
//
//   [grid]    n
//   [params]  beta, delta, r  (optional: rho, h_floor, newton_tol,
//             max_inner_iters)
//   [forcing] f1 expression in (x, y, t), optional bound, optional
//             quad_order; the whole section is optional
//   [run]     t_end, scheme (be | bdf2), output_every, optional dt0
//   [init]    h0 expression in x, or file with one nodal value per line
//
// '#' starts a comment. Unknown sections, unknown keys, duplicates, and
// malformed lines are ConfigErrors carrying the line number.
RunConfig load_config(const std::filesystem::path& path);
RunConfig load_config(std::istream& in, const std::filesystem::path& base_dir);

// Samples or copies the initial profile onto the grid; rejects nonpositive
// values and tables of the wrong length.
GridField initial_field(const RunConfig& config);

}  // namespace thinfilm
