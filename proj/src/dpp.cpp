#include <algorithm>
#include <cmath>
#include <limits>

#include "deadcore/errors.hpp"
#include "deadcore/solver.hpp"

namespace deadcore {

namespace {

Eigen::VectorXd strip_mean_guess(const GridDomain& grid, const BoundaryData& g) {
  Eigen::VectorXd values = grid.sample(g);
  double mean = 0.0;
  for (Index k : grid.boundary_nodes()) mean += values[k];
  if (!grid.boundary_nodes().empty()) mean /= static_cast<double>(grid.boundary_nodes().size());
  for (Index k : grid.interior_nodes()) values[k] = mean;
  return values;
}

}  // namespace

std::vector<std::array<int, 2>> ball_offsets(const GridDomain& grid, double eps) {
  const int r = static_cast<int>(std::floor(eps / grid.h() + 1e-9));
  const double lim = (eps / grid.h()) * (eps / grid.h()) + 1e-9;
  std::vector<std::array<int, 2>> out;
  const int jr = grid.dim() == 2 ? r : 0;
  for (int dj = -jr; dj <= jr; ++dj)
    for (int di = -r; di <= r; ++di)
      if (di * di + dj * dj <= lim) out.push_back({di, dj});
  return out;
}

SolutionField dpp_iterate(const GridDomain& grid, const BoundaryData& g, double p, double eps_dpp,
                          const SolverConfig& config) {
  if (!(config.tol > 0.0) || config.max_iter <= 0) throw Error(ErrorKind::InvalidArgument, "invalid solver config");
  const auto wts = compute_game_weights(StructuralParams::make(grid.dim(), p, 0.0, 0.0));
  if (!(eps_dpp >= 2.0 * grid.h() - 1e-12))
    throw Error(ErrorKind::InvalidArgument, "eps_dpp must be at least 2h");
  if (grid.halo() * grid.h() < eps_dpp - 1e-12)
    throw Error(ErrorKind::InvalidArgument, "grid strip is narrower than eps_dpp");

  const auto offs = ball_offsets(grid, eps_dpp);
  std::vector<Index> delta;
  delta.reserve(offs.size());
  for (const auto& o : offs) delta.push_back(static_cast<Index>(o[0]) + static_cast<Index>(o[1]) * grid.nx());
  for (Index k : grid.interior_nodes()) {
    const auto c = grid.coords(k);
    for (const auto& o : offs) {
      const int i = c[0] + o[0], j = c[1] + o[1];
      if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny() || grid.kind(grid.index(i, j)) == NodeKind::outside)
        throw Error(ErrorKind::InvalidArgument, "mean-value ball leaves the sampled strip");
    }
  }

  Eigen::VectorXd cur = strip_mean_guess(grid, g);
  Eigen::VectorXd next = cur;
  const auto& nodes = grid.interior_nodes();
  const auto count = static_cast<long>(nodes.size());
  const double inv = 1.0 / static_cast<double>(offs.size());
  SolveReport report;
  for (long it = 1; it <= config.max_iter; ++it) {
    double upd = 0.0;
#pragma omp parallel for reduction(max : upd) schedule(static)
    for (long c = 0; c < count; ++c) {
      const Index k = nodes[static_cast<std::size_t>(c)];
      double hi = -std::numeric_limits<double>::infinity(), lo = -hi, sum = 0.0;
      for (Index d : delta) {
        const double v = cur[k + d];
        hi = std::max(hi, v);
        lo = std::min(lo, v);
        sum += v;
      }
      const double v = 0.5 * wts.alpha0 * (hi + lo) + wts.beta0 * sum * inv;
      upd = std::max(upd, std::abs(v - cur[k]));
      next[k] = v;
    }
    std::swap(cur, next);
    report.iterations = it;
    report.max_update = upd;
    if (upd < config.tol) {
      report.converged = true;
      break;
    }
  }
  return SolutionField{grid, std::move(cur), report};
}

}  // namespace deadcore
