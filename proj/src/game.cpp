#include "deadcore/game.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "deadcore/errors.hpp"

namespace deadcore {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Pairwise summation; the split points depend only on the length.
double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t walk_seed(std::uint64_t seed, std::uint64_t walk) {
  return splitmix64(splitmix64(seed) ^ splitmix64(walk + 0x632be59bd9b4e019ULL));
}

BoundaryData extend_along_normal(const GridDomain& grid, BoundaryData F) {
  return [grid, F = std::move(F)](const Point& x) {
    Point y = x;
    if (grid.shape() == DomainShape::ball) {
      const Point d = x - grid.center();
      const double r = d.norm();
      if (r > 0.0) y = grid.center() + grid.radius() * d / r;
    } else {
      y = x.cwiseMax(grid.lo()).cwiseMin(grid.hi());
    }
    return F(y);
  };
}

WalkStats run_game(const Point& x0, const SolutionField& value_ref, const GameConfig& config) {
  const GridDomain& grid = value_ref.grid;
  if (!config.payoff) throw Error(ErrorKind::InvalidArgument, "game needs a payoff");
  const auto w = compute_game_weights(StructuralParams::make(grid.dim(), config.p, 0.0, 0.0));
  if (std::abs(w.alpha0 + w.beta0 - 1.0) > 1e-12) throw Error(ErrorKind::InvalidParams, "weights must sum to one");
  if (!(config.eps >= 2.0 * grid.h() - 1e-12)) throw Error(ErrorKind::InvalidArgument, "eps must be at least 2h");
  if (config.n_walks <= 0) throw Error(ErrorKind::InvalidArgument, "n_walks must be positive");
  if (!value_ref.report.converged) throw Error(ErrorKind::InvalidArgument, "value_ref is not converged");
  const Index start = grid.nearest_node(x0);
  if (!grid.is_interior(start)) throw Error(ErrorKind::InvalidArgument, "x0 must be an interior point");

  const auto offs = ball_offsets(grid, config.eps);
  std::vector<Index> delta;
  for (const auto& o : offs) delta.push_back(static_cast<Index>(o[0]) + static_cast<Index>(o[1]) * grid.nx());
  for (Index k : grid.interior_nodes()) {
    const auto c = grid.coords(k);
    for (const auto& o : offs) {
      const int i = c[0] + o[0], j = c[1] + o[1];
      if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny() || grid.kind(grid.index(i, j)) == NodeKind::outside)
        throw Error(ErrorKind::InvalidArgument, "step ball leaves the sampled strip");
    }
  }

  // Greedy moves on the converged value; ties go to the first node.
  const Eigen::VectorXd& v = value_ref.values;
  std::vector<Index> up(static_cast<std::size_t>(grid.size()), -1), down(up);
  for (Index k : grid.interior_nodes()) {
    Index best_hi = k + delta[0], best_lo = best_hi;
    for (Index d : delta) {
      if (v[k + d] > v[best_hi]) best_hi = k + d;
      if (v[k + d] < v[best_lo]) best_lo = k + d;
    }
    up[static_cast<std::size_t>(k)] = best_hi;
    down[static_cast<std::size_t>(k)] = best_lo;
  }

  const double diam = grid.diameter();
  const long max_steps =
      config.max_steps > 0 ? config.max_steps : static_cast<long>(std::ceil(50.0 * std::pow(diam / config.eps, 2)));

  const long n = config.n_walks;
  std::vector<double> payoff(static_cast<std::size_t>(n)), steps(payoff.size());
  std::vector<char> cut(payoff.size(), 0);
  const double nb = static_cast<double>(delta.size());

#pragma omp parallel for schedule(dynamic, 256)
  for (long wk = 0; wk < n; ++wk) {
    std::mt19937_64 rng(walk_seed(config.seed, static_cast<std::uint64_t>(wk)));
    Index k = start;
    long t = 0;
    while (grid.is_interior(k) && t < max_steps) {
      const double r = unit(rng);
      if (r < w.beta0) {
        const auto pick = std::min(static_cast<std::size_t>(unit(rng) * nb), delta.size() - 1);
        k += delta[pick];
      } else {
        k = unit(rng) < 0.5 ? up[static_cast<std::size_t>(k)] : down[static_cast<std::size_t>(k)];
      }
      ++t;
    }
    const auto s = static_cast<std::size_t>(wk);
    if (grid.is_interior(k)) {
      cut[s] = 1;
      payoff[s] = v[k];
    } else {
      payoff[s] = config.payoff(grid.position(k));
    }
    steps[s] = static_cast<double>(t);
  }

  WalkStats out;
  out.n_walks = n;
  const double nn = static_cast<double>(n);
  // Shifted by the first payoff, which also keeps constant payoffs exact.
  const double shift = payoff[0];
  std::vector<double> sq(payoff.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = payoff[i] - shift;
  out.mean = shift + pairwise_sum(sq.data(), sq.size()) / nn;
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (payoff[i] - out.mean) * (payoff[i] - out.mean);
  out.sd = n > 1 ? std::sqrt(pairwise_sum(sq.data(), sq.size()) / (nn - 1.0)) : 0.0;
  out.ci_half_width = 1.96 * out.sd / std::sqrt(nn);
  out.mean_exit_time = pairwise_sum(steps.data(), steps.size()) / nn;
  out.truncated = static_cast<long>(std::count(cut.begin(), cut.end(), 1));
  out.truncation_warning = static_cast<double>(out.truncated) > 0.01 * nn;
  out.value_ref = v[start];

  double fmax = -HUGE_VAL, fmin = HUGE_VAL;
  for (Index k : grid.boundary_nodes()) {
    const double f = config.payoff(grid.position(k));
    fmax = std::max(fmax, f);
    fmin = std::min(fmin, f);
  }
  const double osc = grid.boundary_nodes().empty() ? 0.0 : fmax - fmin;
  out.consistent = std::abs(out.mean - out.value_ref) <= std::max(3.0 * out.ci_half_width, 0.02 * osc);
  return out;
}

}  // namespace deadcore
