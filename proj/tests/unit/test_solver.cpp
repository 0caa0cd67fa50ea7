#include <cmath>

#include "deadcore/pipelines.hpp"
#include "deadcore/radial.hpp"
#include "deadcore/solver.hpp"
#include "deadcore/geometry.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace deadcore;
using testing::error_kind;
using testing::uniform;

namespace {

const GridDomain& box32() {
  static const GridDomain g = GridDomain::box(make_point(-1, -1), make_point(1, 1), 1.0 / 32);
  return g;
}

double cos_theta(const Point& x) { return x.norm() > 0 ? x[0] / x.norm() : 0.0; }

}  // namespace

TEST_CASE("p-harmonic examples") {
  SolverConfig cfg;
  const auto lin = solve_p_harmonic(box32(), [](const Point& x) { return x[0]; }, 2.0, cfg);
  CHECK(lin.report.converged);
  for (Index k : box32().interior_nodes()) CHECK(std::abs(lin.values[k] - box32().position(k)[0]) < 1e-6);

  for (double p : {1.5, 3.0, 5.0}) {
    const auto c = solve_p_harmonic(box32(), [](const Point&) { return 0.7; }, p, cfg);
    CHECK(c.values.maxCoeff() == doctest::Approx(0.7));
    CHECK(c.min_interior() == doctest::Approx(0.7));
  }
  const auto disk = GridDomain::ball(make_point(0, 0), 1.0, 1.0 / 32);
  const auto u = solve_p_harmonic(disk, cos_theta, 4.0, cfg);
  CHECK(u.report.converged);
  CHECK(u.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("discrete maximum principle") {
  SolverConfig cfg;
  const auto disk = GridDomain::ball(make_point(0, 0), 1.0, 1.0 / 24);
  const auto g = [](const Point& x) { return std::sin(3 * x[0]) + x[1] * x[1]; };
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (Index k : disk.boundary_nodes()) {
    lo = std::min(lo, g(disk.position(k)));
    hi = std::max(hi, g(disk.position(k)));
  }
  for (double p : {1.5, 2.0, 3.0, 4.0, 8.0}) {
    const auto u = solve_p_harmonic(disk, g, p, cfg);
    CHECK(u.report.converged);
    CHECK(u.min_interior() >= lo - 1e-9);
    CHECK(u.max_interior() <= hi + 1e-9);
  }
}

TEST_CASE("radial oracle at coarse resolution") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto prof = RadialDeadCore::make(q, 1.0, make_point(0, 0), 0.3);
  const ProblemSpec problem(q, ThieleSpec::constant(1.0), prof.as_function());
  SolverConfig cfg;
  PerronBracket br;
  const auto u = solve_dirichlet(problem, box32(), cfg, &br);
  CHECK(u.report.converged);
  CHECK(relative_sup_error(u, prof) <= 0.05);
  CHECK(u.report.bracket_violations == 0);
  CHECK(u.values.minCoeff() >= -1e-12);
  CHECK(comparison_check(u, br.upper, cfg.u_tol()).ordered);
  CHECK(comparison_check(br.lower, u, cfg.u_tol()).ordered);
}

TEST_CASE("zero data gives the zero solution") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const ProblemSpec problem(q, ThieleSpec::constant(1.0), [](const Point&) { return 0.0; });
  const auto u = solve_dirichlet(problem, box32(), SolverConfig{});
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dead core threshold in one dimension") {
  // On [-1, 1] with constant data K the solution is C (|x| - (1 - (K/C)^(1/beta)))_+^beta
  // when K <= C, with C the one-dimensional profile constant; above C there is no core.
  const auto q = StructuralParams::make(1, 3, 1, 0.5);
  const double beta = 2.0;
  const double C = compute_cnd(q, 1.0);
  const auto grid = GridDomain::box(make_point(-1.0), make_point(1.0), 1.0 / 256);
  SolverConfig cfg;
  for (double K : {0.5 * C, 0.8 * C, 1.2 * C}) {
    const ProblemSpec problem(q, ThieleSpec::constant(1.0), [K](const Point&) { return K; });
    const auto u = solve_dirichlet(problem, grid, cfg);
    const auto set = positivity_set(u, cfg.u_tol());
    if (K < C) {
      const double core = 1.0 - std::sqrt(K / C);
      CHECK_FALSE(set.dead_core_nodes.empty());
      const double measured = 0.5 * static_cast<double>(set.dead_core_nodes.size()) * grid.h();
      CHECK(std::abs(measured - core) <= 3 * grid.h());
      for (Index k : grid.interior_nodes()) {
        const double x = std::abs(grid.position(k)[0]);
        CHECK(std::abs(u.values[k] - (x > core ? C * std::pow(x - core, beta) : 0.0)) <= 2e-3 * K);
      }
    } else {
      CHECK(set.dead_core_nodes.empty());
    }
  }
}

TEST_CASE("large constant data on a big box opens a dead core") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto grid = GridDomain::box(make_point(-2, -2), make_point(2, 2), 1.0 / 16);
  const ProblemSpec problem(q, ThieleSpec::constant(1.0), [](const Point&) { return 0.2; });
  SolverConfig cfg;
  const auto u = solve_dirichlet(problem, grid, cfg);
  const auto set = positivity_set(u, cfg.u_tol());
  const double frac = static_cast<double>(set.dead_core_nodes.size()) / grid.interior_nodes().size();
  CHECK(frac > 0.0);
  CHECK(frac < 1.0);
}

TEST_CASE("grid refinement against an exact profile") {
  const auto q = StructuralParams::make(2, 3, 0, 0.5);  // beta = 4, exact with a point core
  const auto rows = refinement_sweep(q, 1.0, 0.0, {1.0 / 16, 1.0 / 32, 1.0 / 64}, SolverConfig{});
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].rel_sup_error / rows[i].rel_sup_error >= 1.7);
}

TEST_CASE("monotonicity in the data") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto grid = GridDomain::box(make_point(-1, -1), make_point(1, 1), 1.0 / 16);
  SolverConfig cfg;
  for (int i = 0; i < 5; ++i) {
    const double a = uniform(0.0, 0.5), b = uniform(0.0, 0.5), c = uniform(0.0, 0.3), w = uniform(1, 4);
    const auto g1 = [=](const Point& x) { return a + b * std::sin(w * x[0]) * std::sin(w * x[0]); };
    const auto g2 = [=](const Point& x) { return g1(x) + c * (1 + x[1]) / 2; };
    const auto th = ThieleSpec::constant(1.0);
    const auto u1 = solve_dirichlet(ProblemSpec(q, th, g1), grid, cfg);
    const auto u2 = solve_dirichlet(ProblemSpec(q, th, g2), grid, cfg);
    const auto rep = comparison_check(u1, u2, cfg.u_tol());
    CHECK(rep.boundary_ordered);
    INFO("max excess " << rep.max_excess);
    CHECK(rep.ordered);
  }
}

TEST_CASE("comparison check") {
  const auto q = StructuralParams::make(2, 2, 0, 0);
  const auto prof = RadialDeadCore::make(q, 1.0, make_point(0, 0), 0.2);
  SolutionField a{box32(), box32().sample(prof.as_function()), {}};
  CHECK(comparison_check(a, a, 0.0).ordered);
  SolutionField b = a;
  b.values.array() += 0.1;
  CHECK(comparison_check(a, b, 0.0).ordered);
  const auto rev = comparison_check(b, a, 1e-9);
  CHECK_FALSE(rev.ordered);
  CHECK(rev.violations.size() == box32().interior_nodes().size());
  CHECK_FALSE(rev.boundary_ordered);
  const auto th = ThieleSpec::constant(1.0);
  const auto op = comparison_check(a, b, 0.0, q, th, 0.0);
  REQUIRE(op.operator_ordered.has_value());
  SolutionField other{GridDomain::box(make_point(-1, -1), make_point(1, 1), 1.0 / 16), {}, {}};
  other.values = other.grid.sample(prof.as_function());
  CHECK(error_kind([&] { comparison_check(a, other, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("rescaling") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto th = ThieleSpec::constant(1.0);
  const auto prof = RadialDeadCore::make(q, 1.0, make_point(0, 0), 0.0);
  const auto grid = GridDomain::ball(make_point(0, 0), 1.0, 1.0 / 32);
  SolutionField u{grid, grid.sample(prof.as_function()), {}};

  auto [same, th1] = rescale(u, 1.0, 1.0, th, q);
  CHECK((same.values - u.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(th1(make_point(0.3, 0.1)) == doctest::Approx(1.0));

  const double sup = u.values.maxCoeff();
  auto [unit, th2] = rescale(u, 1.0, sup, th, q);
  CHECK(unit.values.maxCoeff() == doctest::Approx(1.0));

  // rho = 1/2, kappa = c (1/2)^beta: the profile becomes |x|^beta, and it
  // solves the equation with the transformed modulus.
  const double rho = 0.5, kappa = prof.coefficient * std::pow(rho, prof.beta);
  auto [v, thv] = rescale(u, rho, kappa, th, q);
  const RadialDeadCore expected{make_point(0, 0), 0.0, 1.0, prof.beta};
  for (Index k : grid.interior_nodes()) {
    const Point x = grid.position(k);
    // bilinear interpolation of c|y|^2 is off by at most c h^2 / 2 at a cell centre
    CHECK(std::abs(v.values[k] - expected.value(x)) <= 0.5 * grid.h() * grid.h() / std::pow(rho, 2) + 1e-12);
  }
  for (int i = 0; i < 50; ++i) {
    const Point x = make_point(uniform(-0.7, 0.7), uniform(-0.7, 0.7));
    if (x.norm() < 0.05) continue;
    CHECK(std::abs(pde_residual(radial_eval(expected, x), x, q, thv).value) < 1e-10);
  }
  CHECK(error_kind([&] { rescale(u, 1.5, 1.0, th, q); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { rescale(u, 0.5, 0.0, th, q); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("flatness experiment") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto th = ThieleSpec::constant(1.0);
  const auto grid = GridDomain::ball(make_point(0, 0), 1.0, 1.0 / 32);
  SolverConfig cfg;
  const auto one = flatness_experiment(1.0, q, th, grid, cfg);
  const auto prof = RadialDeadCore::make(q, 1.0, make_point(0, 0), 0.0);
  const auto direct = solve_dirichlet(ProblemSpec(q, th, prof.as_function()), grid, cfg);
  CHECK((one.solution.values - direct.values).cwiseAbs().maxCoeff() == 0.0);
  const auto zero = flatness_experiment(0.0, q, th, grid, cfg);
  CHECK(zero.sup_half_ball <= zero.p_harmonic_sup_half_ball);
  double prev = HUGE_VAL;
  for (double z : {1.0, 0.5, 0.25, 0.125}) {
    const auto r = flatness_experiment(z, q, th, grid, cfg);
    CHECK(r.sup_half_ball <= prev);
    CHECK(r.sup_half_ball <= r.p_harmonic_sup_half_ball + 1e-12);
    prev = r.sup_half_ball;
  }
}

TEST_CASE("critical regime keeps positive data positive") {
  const auto grid = GridDomain::ball(make_point(0, 0), 1.0, 1.0 / 32);
  SolverConfig cfg;
  for (double p : {2.0, 3.0})
    for (double g : {0.0, 1.0}) {
      const auto q = StructuralParams::make(2, p, g, g + 1);
      const ProblemSpec problem(q, ThieleSpec::constant(1.0), [](const Point& x) { return 0.5 + 0.25 * x[0]; });
      const auto u = solve_dirichlet(problem, grid, cfg);
      CHECK(u.report.converged);
      CHECK(u.min_interior() > cfg.u_tol());
    }
}

TEST_CASE("thread count does not change the result") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const auto prof = RadialDeadCore::make(q, 1.0, make_point(0, 0), 0.3);
  const ProblemSpec problem(q, ThieleSpec::constant(1.0), prof.as_function());
  SolverConfig one, three;
  one.threads = 1;
  three.threads = 3;
  const auto a = solve_dirichlet(problem, box32(), one);
  const auto b = solve_dirichlet(problem, box32(), three);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("solver input validation") {
  const auto q = StructuralParams::make(2, 3, 1, 0.5);
  const ProblemSpec neg(q, ThieleSpec::constant(1.0), [](const Point& x) { return x[0]; });
  CHECK(error_kind([&] { solve_dirichlet(neg, box32(), SolverConfig{}); }) == ErrorKind::InvalidArgument);
  const ProblemSpec pos(q, ThieleSpec::constant(1.0), [](const Point&) { return 1.0; });
  SolverConfig dpp;
  dpp.scheme = Scheme::dpp_iter;
  CHECK(error_kind([&] { solve_dirichlet(pos, box32(), dpp); }) == ErrorKind::NotApplicable);
  SolverConfig bad;
  bad.tol = 0.0;
  CHECK(error_kind([&] { solve_dirichlet(pos, box32(), bad); }) == ErrorKind::InvalidArgument);
  SolverConfig few;
  few.max_iter = 3;
  few.nested = false;
  CHECK_FALSE(solve_dirichlet(pos, box32(), few).report.converged);
}
