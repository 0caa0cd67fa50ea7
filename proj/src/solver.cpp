#include "deadcore/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deadcore/errors.hpp"
#include "deadcore/operators.hpp"
#include "deadcore/radial.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deadcore {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Right side of the local equation: w t_+^m, or a fixed constant.
struct LocalProblem {
  double p = 2.0;
  double gamma = 0.0;
  double m = 0.0;
  bool absorption = true;  // false: constant source, no truncation
  double source = 0.0;
  Eigen::VectorXd weight;  // a(x) per node
};

// Coefficients of c0 - c1 t at a node: the regularized operator is affine in
// the centre value once the neighbours are frozen.
struct Stencil {
  double c0;
  double c1;
};

// Squared larger one-sided slope along one axis. The modulus factor uses it
// instead of the centred slope, which vanishes at symmetric critical points
// and would pin the factor to its floor there.
inline double one_sided(double plus, double centre, double minus, double h) {
  const double d = std::max(std::abs(plus - centre), std::abs(centre - minus)) / h;
  return d * d;
}

inline Stencil local_stencil(const GridDomain& grid, const double* u, Index k, double p, double gamma,
                             double eps) {
  const double h = grid.h();
  const double h2 = h * h;
  if (grid.dim() == 1) {
    const double e = u[k + 1], w = u[k - 1];
    const double g = (e - w) / (2 * h);
    const double r = g * g + eps * eps;
    const double A = 1.0 + (p - 2.0) * g * g / r;
    const double K = gamma == 0.0 ? 1.0 : std::pow(one_sided(e, u[k], w, h) + eps * eps, 0.5 * gamma);
    return {K * A * (e + w) / h2, 2.0 * K * A / h2};
  }
  const Index nx = grid.nx();
  const double e = u[k + 1], w = u[k - 1], n = u[k + nx], s = u[k - nx];
  const double gx = (e - w) / (2 * h), gy = (n - s) / (2 * h);
  const double r = gx * gx + gy * gy + eps * eps;
  const double q = (p - 2.0) / r;
  const double A11 = 1.0 + q * gx * gx, A22 = 1.0 + q * gy * gy, A12 = q * gx * gy;
  const double mixed = u[k + nx + 1] - u[k + nx - 1] - u[k - nx + 1] + u[k - nx - 1];
  const double K =
      gamma == 0.0 ? 1.0 : std::pow(one_sided(e, u[k], w, h) + one_sided(n, u[k], s, h) + eps * eps, 0.5 * gamma);
  const double S = A11 * (e + w) + A22 * (n + s) + 0.5 * A12 * mixed;
  return {K * S / h2, 2.0 * K * (A11 + A22) / h2};
}

// Root of c0 - c1 t = w t_+^m, truncated at zero.
inline double absorption_root(double c0, double c1, double w, double m) {
  if (!(c0 > 0.0)) return 0.0;
  const double top = c0 / c1;
  if (w <= 0.0) return top;
  if (m == 0.0) return c0 > w ? (c0 - w) / c1 : 0.0;
  if (m == 1.0) return c0 / (c1 + w);
  if (m == 0.5) {
    const double s = 2.0 * c0 / (w + std::sqrt(w * w + 4.0 * c1 * c0));
    return s * s;
  }
  // phi(t) = c0 - c1 t - w t^m decreases on (0, top]; safeguarded Newton.
  double lo = 0.0, hi = top, t = top;
  for (int it = 0; it < 100; ++it) {
    const double tm = std::pow(t, m);
    const double phi = c0 - c1 * t - w * tm;
    if (phi > 0.0) lo = t; else hi = t;
    const double dphi = -c1 - w * m * tm / t;
    double next = t - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

inline double node_target(const LocalProblem& lp, const Stencil& st, Index k) {
  if (!lp.absorption) return (st.c0 - lp.source) / st.c1;
  return absorption_root(st.c0, st.c1, lp.weight[k], lp.m);
}

inline double node_residual(const LocalProblem& lp, const Stencil& st, Index k, double u) {
  const double lhs = st.c0 - st.c1 * u;
  if (!lp.absorption) return std::abs(lhs - lp.source);
  const double w = lp.weight[k];
  if (u > 0.0) return std::abs(lhs - w * positive_power(u, lp.m));
  // Complementarity at dead nodes: the operator may not push upward.
  return std::max(st.c0 - (lp.m == 0.0 ? w : 0.0), 0.0);
}

struct ThreadScope {
  explicit ThreadScope(int threads) {
#ifdef _OPENMP
    previous = omp_get_max_threads();
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
  }
  ~ThreadScope() {
#ifdef _OPENMP
    omp_set_num_threads(previous);
#endif
  }
  int previous = 1;
};

double sor_factor(const GridDomain& grid, const SolverConfig& config) {
  if (config.relax > 0.0) {
    if (!(config.relax < 2.0)) throw Error(ErrorKind::InvalidArgument, "relax must lie in (0, 2)");
    return config.relax;
  }
  double extent = 0.0;
  for (int d = 0; d < grid.dim(); ++d) extent = std::max(extent, grid.hi()[d] - grid.lo()[d]);
  return 2.0 / (1.0 + std::sin(kPi * grid.h() / extent));
}

double sweep(const GridDomain& grid, Eigen::VectorXd& values, const LocalProblem& lp, double eps, double omega) {
  double* u = values.data();
  double max_update = 0.0;
  for (const auto& colour : grid.colours()) {
    const auto count = static_cast<long>(colour.size());
#pragma omp parallel for reduction(max : max_update) schedule(static)
    for (long c = 0; c < count; ++c) {
      const Index k = colour[static_cast<std::size_t>(c)];
      const Stencil st = local_stencil(grid, u, k, lp.p, lp.gamma, eps);
      double next = u[k] + omega * (node_target(lp, st, k) - u[k]);
      if (lp.absorption && next < 0.0) next = 0.0;
      max_update = std::max(max_update, std::abs(next - u[k]));
      u[k] = next;
    }
  }
  return max_update;
}

double residual_norm(const GridDomain& grid, const Eigen::VectorXd& values, const LocalProblem& lp, double eps) {
  double out = 0.0;
  for (Index k : grid.interior_nodes()) {
    const Stencil st = local_stencil(grid, values.data(), k, lp.p, lp.gamma, eps);
    out = std::max(out, node_residual(lp, st, k, values[k]));
  }
  return out;
}

SolveReport relax(const GridDomain& grid, Eigen::VectorXd& values, const LocalProblem& lp,
                  const SolverConfig& config, long budget) {
  const double eps = config.regularization(grid.h());
  const Eigen::VectorXd start = values;
  double scale = 1.0;
  for (Index k : grid.boundary_nodes()) scale = std::max(scale, std::abs(values[k]));
  for (Index k : grid.interior_nodes()) scale = std::max(scale, std::abs(values[k]));

  double omega = sor_factor(grid, config);
  double extent = 0.0;
  for (int d = 0; d < grid.dim(); ++d) extent = std::max(extent, grid.hi()[d] - grid.lo()[d]);
  const long window = std::max<long>(200, static_cast<long>(4.0 * extent / grid.h()));

  SolveReport report;
  double best = std::numeric_limits<double>::infinity();
  long best_at = 0;
  for (long it = 1; it <= budget; ++it) {
    const double upd = sweep(grid, values, lp, eps, omega);
    report.iterations = it;
    report.max_update = upd;
    if (!std::isfinite(upd) || upd > 1e6 * scale) {
      // Divergence: restart plain Gauss-Seidel from the initial guess.
      values = start;
      omega = 1.0;
      best = std::numeric_limits<double>::infinity();
      best_at = it;
      continue;
    }
    if (upd < config.tol) {
      report.converged = true;
      break;
    }
    if (upd < 0.5 * best) {
      best = upd;
      best_at = it;
    } else if (it - best_at > window && omega > 1.0) {
      // Stalled: damp the over-relaxation.
      omega = 1.0 + 0.5 * (omega - 1.0);
      best = upd;
      best_at = it;
    }
  }
  report.residual_norm = residual_norm(grid, values, lp, eps);
  return report;
}

// Prolongs a coarse solution onto the interior nodes of `fine`.
Eigen::VectorXd prolong(const SolutionField& coarse, const GridDomain& fine, const BoundaryData& g) {
  Eigen::VectorXd values = fine.sample(g);
  for (Index k : fine.interior_nodes()) {
    const Point x = fine.position(k);
    try {
      values[k] = coarse.interpolate(x);
    } catch (const Error&) {
      values[k] = g(x);
    }
  }
  return values;
}

using ProblemBuilder = std::function<LocalProblem(const GridDomain&)>;
using InitialGuess = std::function<Eigen::VectorXd(const GridDomain&)>;

SolutionField solve_nested(const GridDomain& grid, const ProblemBuilder& build, const BoundaryData& g,
                           const InitialGuess& init, const SolverConfig& config) {
  Eigen::VectorXd values;
  int levels = 1;
  std::optional<GridDomain> coarse;
  if (config.nested) coarse = grid.coarsened();
  if (coarse && coarse->interior_nodes().size() >= 256) {
    const SolutionField cs = solve_nested(*coarse, build, g, init, config);
    values = prolong(cs, grid, g);
    levels = cs.report.levels + 1;
  } else {
    values = init(grid);
  }
  const LocalProblem lp = build(grid);
  SolveReport report = relax(grid, values, lp, config, config.max_iter);
  report.levels = levels;
  return SolutionField{grid, std::move(values), report};
}

Eigen::VectorXd boundary_mean_guess(const GridDomain& grid, const BoundaryData& g) {
  Eigen::VectorXd values = grid.sample(g);
  double mean = 0.0;
  for (Index k : grid.boundary_nodes()) mean += values[k];
  if (!grid.boundary_nodes().empty()) mean /= static_cast<double>(grid.boundary_nodes().size());
  for (Index k : grid.interior_nodes()) values[k] = mean;
  return values;
}

LocalProblem harmonic_problem(double p) {
  LocalProblem lp;
  lp.p = p;
  lp.absorption = false;
  lp.source = 0.0;
  return lp;
}

void check_config(const SolverConfig& config) {
  if (!(config.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (config.max_iter <= 0) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");
}

Eigen::VectorXd node_weights(const GridDomain& grid, const ThieleSpec& thiele) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.size());
  for (Index k : grid.interior_nodes()) w[k] = thiele(grid.position(k));
  return w;
}

double boundary_sup(const GridDomain& grid, const BoundaryData& g) {
  double out = 0.0;
  for (Index k : grid.boundary_nodes()) {
    const double v = g(grid.position(k));
    if (v < 0.0) throw Error(ErrorKind::InvalidArgument, "boundary data must be nonnegative");
    out = std::max(out, v);
  }
  return out;
}

}  // namespace

double SolutionField::max_interior() const {
  double out = -std::numeric_limits<double>::infinity();
  for (Index k : grid.interior_nodes()) out = std::max(out, values[k]);
  return out;
}

double SolutionField::min_interior() const {
  double out = std::numeric_limits<double>::infinity();
  for (Index k : grid.interior_nodes()) out = std::min(out, values[k]);
  return out;
}

SolutionField solve_p_harmonic(const GridDomain& grid, const BoundaryData& g, double p, const SolverConfig& config) {
  check_config(config);
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidParams, "p must exceed 1");
  ThreadScope scope(config.threads);
  return solve_nested(
      grid, [p](const GridDomain&) { return harmonic_problem(p); }, g,
      [&g](const GridDomain& gr) { return boundary_mean_guess(gr, g); }, config);
}

PerronBracket perron_bracket(const ProblemSpec& problem, const GridDomain& grid, const SolverConfig& config) {
  check_config(config);
  const auto& P = problem.params();
  const BoundaryData& g = problem.boundary();
  const double gsup = boundary_sup(grid, g);
  const Eigen::VectorXd w = node_weights(grid, problem.thiele());
  double amax = 0.0;
  for (Index k : grid.interior_nodes()) amax = std::max(amax, w[k]);
  const double source = amax * (P.m == 0.0 ? (gsup > 0.0 ? 1.0 : 0.0) : std::pow(gsup, P.m));

  ThreadScope scope(config.threads);
  auto guess = [&g](const GridDomain& gr) { return boundary_mean_guess(gr, g); };
  PerronBracket out;
  out.upper = solve_nested(
      grid, [&P](const GridDomain&) { return harmonic_problem(P.p); }, g, guess, config);
  out.lower = solve_nested(
      grid,
      [&P, source](const GridDomain&) {
        LocalProblem lp;
        lp.p = P.p;
        lp.gamma = P.gamma;
        lp.absorption = false;
        lp.source = source;
        return lp;
      },
      g, guess, config);
  return out;
}

SolutionField solve_dirichlet(const ProblemSpec& problem, const GridDomain& grid, const SolverConfig& config,
                              PerronBracket* bracket) {
  check_config(config);
  const auto& P = problem.params();
  const BoundaryData& g = problem.boundary();
  boundary_sup(grid, g);
  if (config.scheme == Scheme::dpp_iter) {
    // The mean-value scheme only covers the homogeneous game equation; use dpp_iterate.
    throw Error(ErrorKind::NotApplicable, "dpp_iter has no absorption term");
  }

  PerronBracket local = perron_bracket(problem, grid, config);
  ThreadScope scope(config.threads);
  const ThieleSpec& thiele = problem.thiele();
  auto build = [&P, &thiele](const GridDomain& gr) {
    LocalProblem lp;
    lp.p = P.p;
    lp.gamma = P.gamma;
    lp.m = P.m;
    lp.absorption = true;
    lp.weight = node_weights(gr, thiele);
    return lp;
  };
  auto init = [&](const GridDomain& gr) {
    // Start the coarsest level from above with its p-harmonic solve.
    SolverConfig flat = config;
    flat.nested = false;
    return solve_nested(
               gr, [&P](const GridDomain&) { return harmonic_problem(P.p); }, g,
               [&g](const GridDomain& q) { return boundary_mean_guess(q, g); }, flat)
        .values;
  };
  SolutionField u = solve_nested(grid, build, g, init, config);

  const double btol = 10.0 * config.u_tol() * std::max(1.0, local.upper.values.cwiseAbs().maxCoeff());
  long violations = 0;
  for (Index k : grid.interior_nodes()) {
    if (u.values[k] > local.upper.values[k] + btol || u.values[k] < local.lower.values[k] - btol) ++violations;
  }
  u.report.bracket_violations = violations;
  if (bracket) *bracket = std::move(local);
  return u;
}

Eigen::VectorXd discrete_residual(const SolutionField& u, const StructuralParams& params, const ThieleSpec& thiele,
                                  double eps_g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.grid.size());
  for (Index k : u.grid.interior_nodes()) {
    if (!has_full_stencil(u.grid, k)) continue;
    const FieldSample s{u.values[k], discrete_jet(u.grid, u.values, k)};
    out[k] = pde_residual(s, u.grid.position(k), params, thiele, eps_g).value;
  }
  return out;
}

ComparisonReport comparison_check(const SolutionField& u_sub, const SolutionField& u_super, double tol) {
  if (!u_sub.grid.same_layout(u_super.grid))
    throw Error(ErrorKind::InvalidArgument, "comparison needs fields on the same grid");
  ComparisonReport out;
  out.boundary_ordered = true;
  for (Index k : u_sub.grid.boundary_nodes())
    if (u_sub.values[k] > u_super.values[k] + tol) out.boundary_ordered = false;
  for (Index k : u_sub.grid.interior_nodes()) {
    const double excess = u_sub.values[k] - u_super.values[k];
    out.max_excess = std::max(out.max_excess, excess);
    if (excess > tol) out.violations.push_back(k);
  }
  out.ordered = out.violations.empty();
  return out;
}

ComparisonReport comparison_check(const SolutionField& u_sub, const SolutionField& u_super, double tol,
                                  const StructuralParams& params, const ThieleSpec& thiele, double eps_g) {
  ComparisonReport out = comparison_check(u_sub, u_super, tol);
  const Eigen::VectorXd rs = discrete_residual(u_sub, params, thiele, eps_g);
  const Eigen::VectorXd rp = discrete_residual(u_super, params, thiele, eps_g);
  bool ok = true;
  for (Index k : u_sub.grid.interior_nodes())
    if (rs[k] < rp[k] - tol) ok = false;
  out.operator_ordered = ok;
  return out;
}

std::pair<SolutionField, ThieleSpec> rescale(const SolutionField& u, double rho, double kappa,
                                             const ThieleSpec& thiele, const StructuralParams& params) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in (0, 1]");
  if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidArgument, "kappa must be positive");
  if (params.critical()) throw Error(ErrorKind::CriticalRegime, "rescaling needs gamma + 1 - m > 0");
  const GridDomain& grid = u.grid;
  SolutionField v{grid, Eigen::VectorXd::Zero(grid.size()), u.report};
  for (Index k = 0; k < grid.size(); ++k) {
    if (grid.kind(k) == NodeKind::outside) continue;
    const Point y = rho * grid.position(k);
    // boundary nodes sit up to h sqrt(n) outside the surface, or within the halo
    const double reach = std::max<double>(grid.halo(), std::sqrt(grid.dim())) * grid.h();
    if (!grid.contains(y) && grid.dist_outside(y) > reach + 1e-12)
      throw Error(ErrorKind::InvalidArgument, "rescaled point leaves the original domain");
    v.values[k] = u.interpolate(y) / kappa;
  }
  const double factor = std::pow(rho, 2.0 + params.gamma) / std::pow(kappa, params.gamma + 1.0 - params.m);
  return {std::move(v), thiele.scaled(factor, rho)};
}

FlatnessReport flatness_experiment(double zeta, const StructuralParams& params, const ThieleSpec& thiele,
                                   const GridDomain& grid, const SolverConfig& config) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "zeta must lie in [0, 1]");
  if (params.critical()) throw Error(ErrorKind::CriticalRegime, "flatness needs gamma + 1 - m > 0");
  const double lambda = zeta * zeta * thiele.lambda0();
  BoundaryData g;
  if (lambda > 0.0) {
    const auto profile = RadialDeadCore::make(params, lambda, Point::Zero(grid.dim()), 0.0);
    g = profile.as_function();
  } else {
    g = [](const Point&) { return 0.0; };
  }
  auto sup_half = [&grid](const Eigen::VectorXd& vals) {
    double s = 0.0;
    for (Index k = 0; k < grid.size(); ++k)
      if (grid.kind(k) != NodeKind::outside && grid.position(k).norm() < 0.5) s = std::max(s, vals[k]);
    return s;
  };
  FlatnessReport out;
  out.zeta = zeta;
  const SolutionField harmonic = solve_p_harmonic(grid, g, params.p, config);
  out.p_harmonic_sup_half_ball = sup_half(harmonic.values);
  if (zeta > 0.0) {
    const ProblemSpec problem(params, thiele.scaled(zeta * zeta, 1.0), g);
    out.solution = solve_dirichlet(problem, grid, config);
  } else {
    out.solution = harmonic;
  }
  out.sup_half_ball = sup_half(out.solution.values);
  return out;
}

}  // namespace deadcore
