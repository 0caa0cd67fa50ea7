#include <cmath>
#include <set>

#include "deadcore/game.hpp"
#include "deadcore/solver.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace deadcore;
using testing::error_kind;

namespace {

double cos_theta(const Point& x) { return x.norm() > 0 ? x[0] / x.norm() : 0.0; }

double sup_diff(const SolutionField& a, const SolutionField& b) {
  double d = 0.0;
  for (Index k : a.grid.interior_nodes()) d = std::max(d, std::abs(a.values[k] - b.values[k]));
  return d;
}

// Plain ball averaging, written out over node positions.
Eigen::VectorXd averaging_oracle(const GridDomain& grid, const BoundaryData& g, double eps, double tol) {
  Eigen::VectorXd u = grid.sample(g);
  double mean = 0.0;
  for (Index k : grid.boundary_nodes()) mean += u[k];
  mean /= static_cast<double>(grid.boundary_nodes().size());
  for (Index k : grid.interior_nodes()) u[k] = mean;
  std::vector<std::vector<Index>> balls;
  for (Index k : grid.interior_nodes()) {
    std::vector<Index> ball;
    const Point x = grid.position(k);
    for (Index j = 0; j < grid.size(); ++j)
      if (grid.kind(j) != NodeKind::outside && (grid.position(j) - x).norm() <= eps + 1e-9 * grid.h()) ball.push_back(j);
    balls.push_back(std::move(ball));
  }
  Eigen::VectorXd next = u;
  for (int it = 0; it < 1000000; ++it) {
    double upd = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
      double s = 0.0;
      for (Index j : balls[i]) s += u[j];
      const Index k = grid.interior_nodes()[i];
      next[k] = s / static_cast<double>(balls[i].size());
      upd = std::max(upd, std::abs(next[k] - u[k]));
    }
    u.swap(next);
    if (upd < tol) break;
  }
  return u;
}

}  // namespace

TEST_CASE("ball offsets") {
  const auto g = GridDomain::box(make_point(-1, -1), make_point(1, 1), 0.1, 4);
  const auto offs = ball_offsets(g, 0.2);
  CHECK(offs.size() == 13);  // lattice points with i^2 + j^2 <= 4
  bool centre = false;
  for (const auto& o : offs) centre = centre || (o[0] == 0 && o[1] == 0);
  CHECK(centre);
  const auto g1 = GridDomain::box(make_point(0.0), make_point(1.0), 0.1, 4);
  CHECK(ball_offsets(g1, 0.3).size() == 7);
}

TEST_CASE("mean-value iteration examples") {
  SolverConfig cfg;
  for (double p : {2.0, 4.0}) {
    const auto g = GridDomain::box(make_point(0.0), make_point(1.0), 1.0 / 64, 4);
    const auto u = dpp_iterate(g, [](const Point& x) { return x[0]; }, p, 4.0 / 64, cfg);
    CHECK(u.report.converged);
    for (Index k : g.interior_nodes()) CHECK(std::abs(u.values[k] - g.position(k)[0]) < 1e-5);
  }
}

TEST_CASE("mean-value iteration against the p-harmonic solver") {
  SolverConfig cfg;
  const double h = 1.0 / 32;
  const auto disk = GridDomain::ball(make_point(0, 0), 1.0, h, 8);
  const auto F = extend_along_normal(disk, cos_theta);
  const auto fd = solve_p_harmonic(disk, F, 4.0, cfg);
  double prev = HUGE_VAL;
  for (int k : {8, 4, 2}) {
    const auto d = dpp_iterate(disk, F, 4.0, k * h, cfg);
    CHECK(d.report.converged);
    const double diff = sup_diff(d, fd);
    if (k == 4) CHECK(diff <= 0.05);
    CHECK(diff <= prev);
    prev = diff;
  }
}

TEST_CASE("p = 2 is plain ball averaging") {
  SolverConfig cfg;
  const double h = 1.0 / 16;
  const auto disk = GridDomain::ball(make_point(0, 0), 1.0, h, 3);
  const auto F = extend_along_normal(disk, cos_theta);
  const auto d = dpp_iterate(disk, F, 2.0, 3 * h, cfg);
  const Eigen::VectorXd oracle = averaging_oracle(disk, F, 3 * h, cfg.tol);
  double diff = 0.0;
  for (Index k : disk.interior_nodes()) diff = std::max(diff, std::abs(d.values[k] - oracle[k]));
  CHECK(diff <= 10 * cfg.tol);
}

TEST_CASE("mean-value iteration input validation") {
  SolverConfig cfg;
  const auto g = GridDomain::box(make_point(0.0), make_point(1.0), 1.0 / 32, 2);
  const auto F = [](const Point& x) { return x[0]; };
  CHECK(error_kind([&] { dpp_iterate(g, F, 1.5, 2.0 / 32, cfg); }) == ErrorKind::UnsupportedGameRange);
  CHECK(error_kind([&] { dpp_iterate(g, F, 3.0, 1.0 / 32, cfg); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { dpp_iterate(g, F, 3.0, 4.0 / 32, cfg); }) == ErrorKind::InvalidArgument);
}

namespace {

struct Fixture {
  GridDomain grid = GridDomain::box(make_point(0.0), make_point(1.0), 1.0 / 32, 4);
  SolutionField value(double p, const BoundaryData& F) const {
    return dpp_iterate(grid, F, p, 4.0 / 32, SolverConfig{});
  }
  GameConfig game(double p, const BoundaryData& F, std::uint64_t seed = 11) const {
    GameConfig c;
    c.p = p;
    c.eps = 4.0 / 32;
    c.n_walks = 20000;
    c.seed = seed;
    c.payoff = F;
    return c;
  }
};

}  // namespace

TEST_CASE("game value on linear payoffs") {
  Fixture f;
  const auto F = [](const Point& x) { return x[0]; };
  for (double p : {2.0, 4.0}) {
    const auto v = f.value(p, F);
    const auto s = run_game(make_point(0.40625), v, f.game(p, F));
    CHECK(s.n_walks == 20000);
    CHECK(std::abs(s.mean - s.value_ref) <= 3 * s.ci_half_width);
    CHECK(s.consistent);
    CHECK(s.ci_half_width == doctest::Approx(1.96 * s.sd / std::sqrt(20000.0)));
    CHECK(s.mean_exit_time > 0.0);
  }
}

TEST_CASE("constant payoff has no spread") {
  Fixture f;
  const auto F = [](const Point&) { return 0.3; };
  const auto s = run_game(make_point(0.5), f.value(3.0, F), f.game(3.0, F));
  CHECK(s.mean == 0.3);
  CHECK(s.sd == 0.0);
}

TEST_CASE("game reproducibility") {
  Fixture f;
  const auto F = [](const Point& x) { return x[0] * x[0]; };
  const auto v = f.value(4.0, F);
  const auto a = run_game(make_point(0.5), v, f.game(4.0, F, 5));
  const auto b = run_game(make_point(0.5), v, f.game(4.0, F, 5));
  const auto c = run_game(make_point(0.5), v, f.game(4.0, F, 6));
  CHECK(a.mean == b.mean);
  CHECK(a.sd == b.sd);
  CHECK(a.mean != c.mean);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t w = 0; w < 1000; ++w) seeds.insert(walk_seed(5, w));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("negated payoff negates the value") {
  Fixture f;
  const auto F = [](const Point& x) { return std::sin(4 * x[0]); };
  const auto G = [&](const Point& x) { return -F(x); };
  const auto a = run_game(make_point(0.3125), f.value(4.0, F), f.game(4.0, F));
  const auto b = run_game(make_point(0.3125), f.value(4.0, G), f.game(4.0, G));
  CHECK(a.value_ref == doctest::Approx(-b.value_ref).epsilon(1e-12));
  CHECK(std::abs(a.mean + b.mean) <= 3 * (a.ci_half_width + b.ci_half_width));
}

TEST_CASE("truncation accounting") {
  Fixture f;
  const auto F = [](const Point& x) { return x[0]; };
  const auto v = f.value(2.0, F);
  const auto ok = run_game(make_point(0.5), v, f.game(2.0, F));
  CHECK(ok.truncated <= ok.n_walks / 100);
  CHECK_FALSE(ok.truncation_warning);
  auto tight = f.game(2.0, F);
  tight.max_steps = 2;
  const auto cut = run_game(make_point(0.5), v, tight);
  CHECK(cut.truncated > cut.n_walks / 100);
  CHECK(cut.truncation_warning);
}

TEST_CASE("game input validation") {
  Fixture f;
  const auto F = [](const Point& x) { return x[0]; };
  const auto v = f.value(3.0, F);
  auto bad = f.game(3.0, F);
  bad.eps = 1.0 / 32;
  CHECK(error_kind([&] { run_game(make_point(0.5), v, bad); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { run_game(make_point(0.5), v, f.game(1.5, F)); }) == ErrorKind::UnsupportedGameRange);
  CHECK(error_kind([&] { run_game(make_point(1.5), v, f.game(3.0, F)); }) == ErrorKind::InvalidArgument);
  auto none = f.game(3.0, F);
  none.payoff = nullptr;
  CHECK(error_kind([&] { run_game(make_point(0.5), v, none); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("normal extension") {
  const auto disk = GridDomain::ball(make_point(0, 0), 1.0, 0.1, 3);
  const auto F = extend_along_normal(disk, [](const Point& x) { return x[0] + 2 * x[1]; });
  CHECK(F(make_point(1.2, 0.0)) == doctest::Approx(1.0));
  CHECK(F(make_point(0.0, -1.3)) == doctest::Approx(-2.0));
}
