#pragma once

#include <cstdint>

#include "deadcore/solver.hpp"

namespace deadcore {

struct GameConfig {
  double p = 2.0;
  double eps = 0.0;        ///< step radius
  long n_walks = 100000;
  long max_steps = 0;      ///< <= 0 selects 50 (diam / eps)^2
  std::uint64_t seed = 0;
  BoundaryData payoff;     ///< F on the exterior strip
};

struct WalkStats {
  long n_walks = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_half_width = 0.0;  ///< 1.96 sd / sqrt(n_walks)
  double mean_exit_time = 0.0;
  long truncated = 0;
  bool truncation_warning = false;  ///< more than 1% of walks hit max_steps
  double value_ref = 0.0;           ///< reference value at the start node
  bool consistent = false;          ///< |mean - value_ref| <= max(3 CI, 0.02 osc F)
};

/// Tug-of-war with noise on the nodes of value_ref's grid. With probability
/// beta0 the token jumps to a uniform node of B_eps(x); otherwise a fair coin
/// lets the maximizer (argmax of value_ref over the ball) or the minimizer
/// (argmin) move it. Walks stop on reaching the strip and collect F there.
WalkStats run_game(const Point& x0, const SolutionField& value_ref, const GameConfig& config);

/// F extended constantly along the outward normal: F(pi(x)) with pi the
/// nearest-point projection onto the domain boundary.
BoundaryData extend_along_normal(const GridDomain& grid, BoundaryData F);

/// Stream seed for walk `walk`; distinct walks get independent generators.
std::uint64_t walk_seed(std::uint64_t seed, std::uint64_t walk);

}  // namespace deadcore
