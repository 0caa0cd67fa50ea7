#pragma once

#include <string>
#include <vector>

#include "deadcore/params.hpp"
#include "deadcore/solver.hpp"

namespace deadcore {

/// Nodes split by u > u_tol; cells whose corners disagree form the free boundary.
struct PositivitySet {
  double u_tol = 0.0;
  std::vector<Index> positive_nodes;     ///< interior nodes with u > u_tol
  std::vector<Index> dead_core_nodes;    ///< remaining interior nodes
  std::vector<Index> free_boundary_cells;  ///< lower-left corner node of each sign-change cell
  std::vector<Point> cell_centers;
  std::vector<char> positive;            ///< per-node indicator (any non-outside node)

  bool has_free_boundary() const { return !free_boundary_cells.empty(); }
};

PositivitySet positivity_set(const SolutionField& u, double u_tol);

/// Distance to the nearest free-boundary cell centre (infinity without one).
double distance_to_free_boundary(const PositivitySet& set, const Point& x);
/// Same for every node; outside nodes get infinity.
Eigen::VectorXd free_boundary_distance_field(const GridDomain& grid, const PositivitySet& set);

/// Free-boundary cell centre closest to x.
Point nearest_free_boundary_point(const PositivitySet& set, const Point& x);
/// First node of positive u met walking from `from` along `dir` in steps of h.
Point first_positive_along(const SolutionField& u, double u_tol, const Point& from, const Point& dir);

struct FitReport {
  double exponent = 0.0;
  double intercept = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> skipped;  ///< radii whose ball left the domain
  double rms_residual = 0.0;
  double target = 0.0;
  double rel_dev = 0.0;
};

/// Least squares of log values against log radii; needs at least 5 strictly
/// increasing radii spanning a factor of 8.
FitReport log_log_fit(const std::vector<double>& radii, const std::vector<double>& values, double target);

/// 4h 2^(k/2) up to dist(x0, boundary) / 2.
std::vector<double> default_radii(const GridDomain& grid, const Point& x0);

/// Max of u over nodes of the closed ball B_r(x0).
double ball_sup(const SolutionField& u, const Point& x0, double r);

/// Slope of log sup_{B_r(x0)} u; the target is beta, or the Henon exponent
/// when x0 lies in the weight's zero set.
FitReport fit_growth_exponent(const SolutionField& u, const Point& x0, std::vector<double> radii,
                              const StructuralParams& params, const ThieleSpec& thiele, double u_tol);

struct NondegeneracyReport {
  std::vector<double> radii;
  std::vector<double> sups;
  std::vector<double> ratios;  ///< sup / (C_ND r^beta)
  double min_ratio = 0.0;
};

NondegeneracyReport check_nondegeneracy(const SolutionField& u, const Point& x0, std::vector<double> radii,
                                        const StructuralParams& params, double lambda0, double u_tol);

struct DensityReport {
  std::vector<double> radii;
  std::vector<double> theta;
  std::vector<double> skipped;
  double min_theta = 0.0;
};

DensityReport measure_density(const SolutionField& u, const Point& x0, std::vector<double> radii, double u_tol);

struct PorosityReport {
  std::vector<double> radii;
  std::vector<double> delta_min;     ///< over free-boundary cells
  std::vector<double> delta_median;
  std::vector<long> cells_used;
  double delta_overall_min = 0.0;
};

PorosityReport estimate_porosity(const SolutionField& u, std::vector<double> radii, double u_tol);

/// Slope of log sup_{B_r(x0)} |grad u| (central differences); target (1+m)/(gamma+1-m).
FitReport fit_gradient_decay(const SolutionField& u, const Point& x0, std::vector<double> radii,
                             const StructuralParams& params, double u_tol);

struct L2AverageReport {
  std::vector<double> radii;
  std::vector<double> S;
  std::vector<double> skipped;
  double target = 0.0;   ///< gamma m / (gamma + 1 - m)
  double slope = 0.0;
  double bound = 0.0;    ///< S(r_max) / r_max^target
  bool bound_holds = false;  ///< S(r) <= bound r^target at every radius
  bool slope_ok = false;     ///< slope >= target - 0.1
};

/// S(r) = sqrt(mean over B_r(x0) of (|grad u|^gamma |D^2 u|_F)^2).
L2AverageReport l2_hessian_average(const SolutionField& u, const Point& x0, std::vector<double> radii,
                                   const StructuralParams& params, double u_tol);

struct DistanceReport {
  double max_ratio = 0.0;  ///< over positive nodes of u / rho^beta
  double min_ratio = 0.0;  ///< over positive nodes with rho >= 4h
  long nodes = 0;
  long far_nodes = 0;
};

DistanceReport distance_bounds(const SolutionField& u, const StructuralParams& params, double u_tol);

}  // namespace deadcore
