#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deadcore/config.hpp"
#include "deadcore/game.hpp"
#include "deadcore/radial.hpp"
#include "deadcore/solver.hpp"

namespace deadcore {

inline constexpr const char* kVersion = "0.1.0";

/// Raised by pipelines when an iteration stops at max_iter (exit code 3).
struct NonConvergence {
  std::string what;
};

// Radial profile sweep -------------------------------------------------------

struct RadialSweepSpec {
  std::vector<int> n{1, 2};
  std::vector<double> p{1.5, 2.0, 3.0};
  std::vector<double> gamma{-0.5, 0.0, 1.0};
  std::vector<double> m_factor{0.0, 0.5};  ///< m = m_factor (gamma + 1)
  std::vector<double> lambda0{0.5, 1.0, 2.0};
  int samples = 200;
  double core_radius_1d = 0.25;  ///< 2-D instances use a point core (the exact solution)
  double core_radius_2d = 0.0;
};

struct RadialRow {
  int n = 1;
  double p = 2.0, gamma = 0.0, m = 0.0, lambda0 = 1.0, core_radius = 0.0;
  Point x;
  double rho = 0.0;
  double value = 0.0;
  double abs_residual = 0.0;
};

/// Points with dist(x, center) - r spread over [0.05, 1]; 2-D directions
/// follow the golden angle.
std::vector<Point> radial_sample_points(int n, const Point& center, double r, int count);

/// One row per (instance, sample). Critical or invalid tuples throw.
std::vector<RadialRow> radial_sweep(const RadialSweepSpec& spec);

// Grid refinement against the radial oracle ---------------------------------

struct RefinementRow {
  double h = 0.0;
  double rel_sup_error = 0.0;
  double factor = 0.0;  ///< previous error / this error (0 on the first row)
  long iterations = 0;
  bool converged = false;
};

/// Solves on [-1, 1]^n with the radial profile as data and a = lambda.
std::vector<RefinementRow> refinement_sweep(const StructuralParams& params, double lambda, double core_radius,
                                            const std::vector<double>& hs, const SolverConfig& config);

/// max |u - profile| / max profile over interior nodes.
double relative_sup_error(const SolutionField& u, const RadialDeadCore& profile);

// Liouville sweeps -----------------------------------------------------------

enum class LiouvilleMode { bounded_level, growth };

struct LiouvilleSpec {
  LiouvilleMode mode = LiouvilleMode::bounded_level;
  double theta = 0.25;        ///< data level as a fraction of C_ND R^beta
  double k0 = 1.0;            ///< growth mode: data k0 R^s
  double growth = -1.0;       ///< s; < 0 selects beta / 2
  std::vector<double> R{4.0, 8.0, 16.0};
  std::vector<Point> probes;  ///< empty: (0,0), (1,0), (2,0), (3,0)
  double h = 1.0 / 64.0;      ///< spacing of the unit-ball grid
};

struct LiouvilleRow {
  double R = 0.0;
  double boundary_ratio = 0.0;  ///< data / (C_ND R^beta)
  Point probe;
  double u_probe = 0.0;
  double v_probe = 0.0;         ///< NaN when the level exceeds one
  long iterations = 0;
  bool converged = false;
};

/// Each B_R problem is pulled back to the unit ball with rho = R and kappa
/// equal to the boundary value, solved there and read at probe / R.
std::vector<LiouvilleRow> liouville_sweep(const LiouvilleSpec& spec, const StructuralParams& params, double lambda,
                                          const SolverConfig& config);

// Game -----------------------------------------------------------------------

struct GameRun {
  SolutionField dpp;
  WalkStats stats;
};

GameRun play_game(const GridDomain& grid, const GameConfig& game, const Point& x0, const SolverConfig& config);

// Command front-end ----------------------------------------------------------

struct RunOptions {
  std::string command;
  ExperimentConfig config;
  std::string out_dir = ".";
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

/// Runs one subcommand, writing CSVs and manifest.json into out_dir.
/// Returns 0, 2 (config or validation error) or 3 (non-convergence).
int run_command(const RunOptions& options, std::ostream& log);

}  // namespace deadcore
