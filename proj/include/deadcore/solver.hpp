#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "deadcore/grid.hpp"
#include "deadcore/params.hpp"

namespace deadcore {

enum class Scheme { fd_relax, dpp_iter };

struct SolverConfig {
  Scheme scheme = Scheme::fd_relax;
  double eps_g = 0.0;     ///< gradient regularization; <= 0 selects h^2
  double relax = 0.0;     ///< relaxation factor in (0, 2); <= 0 selects the SOR optimum for the grid
  double tol = 1e-8;      ///< sup-norm update tolerance
  long max_iter = 200000;
  double eps_dpp = 0.0;   ///< mean-value ball radius (dpp_iter only)
  int threads = 0;        ///< 0 keeps the runtime default
  bool nested = true;     ///< warm start from a solve on the 2h lattice

  double u_tol() const { return 10.0 * tol; }
  double regularization(double h) const { return eps_g > 0.0 ? eps_g : h * h; }
};

struct SolveReport {
  long iterations = 0;  ///< sweeps on the finest lattice
  double max_update = 0.0;
  double residual_norm = 0.0;
  long bracket_violations = 0;
  bool converged = false;
  int levels = 1;
};

/// Node values on a grid; boundary nodes hold the Dirichlet data.
struct SolutionField {
  GridDomain grid;
  Eigen::VectorXd values;
  SolveReport report;

  double interpolate(const Point& x) const { return grid.interpolate(values, x); }
  double max_interior() const;
  double min_interior() const;
};

/// Sub- and supersolution pinning the solution: u_lower solves the equation
/// with the constant right side sup(a) ||g||^m, u_upper is p-harmonic.
struct PerronBracket {
  SolutionField lower;
  SolutionField upper;
};

/// Regularized discrete Delta_p^N u = 0 with Dirichlet data g.
SolutionField solve_p_harmonic(const GridDomain& grid, const BoundaryData& g, double p, const SolverConfig& config);

PerronBracket perron_bracket(const ProblemSpec& problem, const GridDomain& grid, const SolverConfig& config);

/// Multicolour nonlinear SOR on the regularized discrete equation with the
/// one-phase truncation u <- max(u, 0). The report counts nodes escaping the
/// Perron bracket; pass `bracket` to keep the bracket fields.
SolutionField solve_dirichlet(const ProblemSpec& problem, const GridDomain& grid, const SolverConfig& config,
                              PerronBracket* bracket = nullptr);

/// Pointwise residual of the regularized discrete operator at interior nodes
/// (zero elsewhere and at nodes without a full stencil).
Eigen::VectorXd discrete_residual(const SolutionField& u, const StructuralParams& params, const ThieleSpec& thiele,
                                  double eps_g);

/// Fixed point of u = alpha0/2 (max + min) + beta0 mean over the node ball
/// B_eps(x), with u = g on the exterior strip. Needs p >= 2 and a grid halo
/// covering eps.
SolutionField dpp_iterate(const GridDomain& grid, const BoundaryData& g, double p, double eps_dpp,
                          const SolverConfig& config);

/// Lattice offsets (di, dj) with |(di, dj)| h <= eps, in increasing node-index order.
std::vector<std::array<int, 2>> ball_offsets(const GridDomain& grid, double eps);

struct ComparisonReport {
  bool ordered = false;           ///< u_sub <= u_super + tol at every interior node
  bool boundary_ordered = false;  ///< the same on boundary nodes (hypothesis)
  std::optional<bool> operator_ordered;  ///< residual(u_sub) >= residual(u_super), when checked
  std::vector<Index> violations;
  double max_excess = 0.0;
};

ComparisonReport comparison_check(const SolutionField& u_sub, const SolutionField& u_super, double tol);
ComparisonReport comparison_check(const SolutionField& u_sub, const SolutionField& u_super, double tol,
                                  const StructuralParams& params, const ThieleSpec& thiele, double eps_g);

/// v(x) = u(rho x) / kappa on the same grid, with the modulus
/// rho^(2+gamma) / kappa^(gamma+1-m) a(rho x) that v solves.
std::pair<SolutionField, ThieleSpec> rescale(const SolutionField& u, double rho, double kappa,
                                             const ThieleSpec& thiele, const StructuralParams& params);

struct FlatnessReport {
  double zeta = 1.0;
  double sup_half_ball = 0.0;
  double p_harmonic_sup_half_ball = 0.0;  ///< same data, no absorption
  SolutionField solution;
};

/// Solves with modulus zeta^2 a(x) and data c_zeta |x|^beta, the radial
/// profile of the zeta-problem (so u(0) = 0), and measures sup over B_{1/2}.
FlatnessReport flatness_experiment(double zeta, const StructuralParams& params, const ThieleSpec& thiele,
                                   const GridDomain& grid, const SolverConfig& config);

}  // namespace deadcore
