#include "deadcore/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deadcore/errors.hpp"
#include "deadcore/operators.hpp"

namespace deadcore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-outside nodes of the closed ball B_r(x0).
std::vector<Index> ball_nodes(const GridDomain& grid, const Point& x0, double r) {
  std::vector<Index> out;
  const auto c = grid.coords(grid.nearest_node(x0));
  const int w = static_cast<int>(std::ceil(r / grid.h())) + 1;
  const int jw = grid.dim() == 2 ? w : 0;
  const double lim = r + 1e-9 * grid.h();
  for (int j = std::max(0, c[1] - jw); j <= std::min(grid.ny() - 1, c[1] + jw); ++j)
    for (int i = std::max(0, c[0] - w); i <= std::min(grid.nx() - 1, c[0] + w); ++i) {
      const Index k = grid.index(i, j);
      if (grid.kind(k) == NodeKind::outside) continue;
      if ((grid.position(k) - x0).norm() <= lim) out.push_back(k);
    }
  return out;
}

bool ball_inside(const GridDomain& grid, const Point& x0, double r) {
  return grid.contains(x0) && r <= grid.dist_to_surface(x0) * (1.0 + 1e-9) + 1e-12;
}

double fb_reach(const GridDomain& grid) { return grid.h() * std::sqrt(static_cast<double>(grid.dim())) + 1e-12; }

void require_free_boundary_point(const PositivitySet& set, const GridDomain& grid, const Point& x0) {
  if (!set.has_free_boundary()) throw Error(ErrorKind::InsufficientSignal, "no free boundary in the field");
  if (distance_to_free_boundary(set, x0) > fb_reach(grid))
    throw Error(ErrorKind::InsufficientSignal, "x0 is not a free-boundary point");
}

// Splits radii into those whose ball stays inside the domain and the rest.
std::vector<double> admissible(const GridDomain& grid, const Point& x0, std::vector<double> radii,
                               std::vector<double>& skipped) {
  if (radii.empty()) radii = default_radii(grid, x0);
  std::vector<double> keep;
  for (double r : radii) (ball_inside(grid, x0, r) ? keep : skipped).push_back(r);
  return keep;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double out = v[mid];
  if (v.size() % 2 == 0) out = 0.5 * (out + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
  return out;
}

}  // namespace

PositivitySet positivity_set(const SolutionField& u, double u_tol) {
  const GridDomain& grid = u.grid;
  PositivitySet out;
  out.u_tol = u_tol;
  out.positive.assign(static_cast<std::size_t>(grid.size()), 0);
  for (Index k = 0; k < grid.size(); ++k)
    if (grid.kind(k) != NodeKind::outside && u.values[k] > u_tol) out.positive[static_cast<std::size_t>(k)] = 1;
  for (Index k : grid.interior_nodes())
    (out.positive[static_cast<std::size_t>(k)] ? out.positive_nodes : out.dead_core_nodes).push_back(k);

  const int cj = grid.dim() == 2 ? grid.ny() - 1 : 1;
  const double h = grid.h();
  for (int j = 0; j < cj; ++j)
    for (int i = 0; i + 1 < grid.nx(); ++i) {
      std::vector<Index> corners{grid.index(i, j), grid.index(i + 1, j)};
      if (grid.dim() == 2) {
        corners.push_back(grid.index(i, j + 1));
        corners.push_back(grid.index(i + 1, j + 1));
      }
      bool usable = true, any_interior = false;
      int pos = 0;
      for (Index k : corners) {
        if (grid.kind(k) == NodeKind::outside) usable = false;
        if (grid.is_interior(k)) any_interior = true;
        pos += out.positive[static_cast<std::size_t>(k)];
      }
      if (!usable || !any_interior || pos == 0 || pos == static_cast<int>(corners.size())) continue;
      out.free_boundary_cells.push_back(corners[0]);
      out.cell_centers.push_back(grid.position(corners[0]) + Point::Constant(grid.dim(), 0.5 * h));
    }
  return out;
}

double distance_to_free_boundary(const PositivitySet& set, const Point& x) {
  double best = kInf;
  for (const Point& c : set.cell_centers) best = std::min(best, (c - x).squaredNorm());
  return std::sqrt(best);
}

Eigen::VectorXd free_boundary_distance_field(const GridDomain& grid, const PositivitySet& set) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(grid.size(), kInf);
  const long total = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < total; ++k) {
    if (grid.kind(k) == NodeKind::outside) continue;
    out[k] = distance_to_free_boundary(set, grid.position(k));
  }
  return out;
}

Point nearest_free_boundary_point(const PositivitySet& set, const Point& x) {
  if (!set.has_free_boundary()) throw Error(ErrorKind::NoFreeBoundary, "free boundary is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.cell_centers.size(); ++i)
    if ((set.cell_centers[i] - x).squaredNorm() < (set.cell_centers[best] - x).squaredNorm()) best = i;
  return set.cell_centers[best];
}

Point first_positive_along(const SolutionField& u, double u_tol, const Point& from, const Point& dir) {
  const GridDomain& grid = u.grid;
  const Point step = grid.h() * dir.normalized();
  Point x = from;
  while (grid.contains(x)) {
    const Index k = grid.nearest_node(x);
    if (grid.kind(k) != NodeKind::outside && u.values[k] > u_tol) return grid.position(k);
    x += step;
  }
  throw Error(ErrorKind::NoFreeBoundary, "no positive node along the ray");
}

FitReport log_log_fit(const std::vector<double>& radii, const std::vector<double>& values, double target) {
  if (radii.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "radii and values differ in length");
  if (radii.size() < 5) throw Error(ErrorKind::InsufficientSignal, "fit needs at least 5 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw Error(ErrorKind::InvalidArgument, "radii must be positive and strictly increasing");
    if (!(values[i] > 0.0)) throw Error(ErrorKind::InsufficientSignal, "fit values must be positive");
  }
  if (radii.back() < 8.0 * radii.front() * (1.0 - 1e-12))
    throw Error(ErrorKind::InsufficientSignal, "radii must span a factor of 8");

  const auto n = static_cast<Index>(radii.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) {
    A(i, 0) = std::log(radii[static_cast<std::size_t>(i)]);
    A(i, 1) = 1.0;
    b[i] = std::log(values[static_cast<std::size_t>(i)]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  FitReport out;
  out.exponent = coef[0];
  out.intercept = coef[1];
  out.radii = radii;
  out.values = values;
  out.rms_residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(n));
  out.target = target;
  out.rel_dev = target != 0.0 ? std::abs(out.exponent - target) / std::abs(target) : std::abs(out.exponent);
  return out;
}

std::vector<double> default_radii(const GridDomain& grid, const Point& x0) {
  const double cap = 0.5 * grid.dist_to_surface(x0);
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double r = 4.0 * grid.h() * std::pow(2.0, 0.5 * k);
    if (r > cap) break;
    out.push_back(r);
  }
  return out;
}

double ball_sup(const SolutionField& u, const Point& x0, double r) {
  double out = -kInf;
  for (Index k : ball_nodes(u.grid, x0, r)) out = std::max(out, u.values[k]);
  return out;
}

FitReport fit_growth_exponent(const SolutionField& u, const Point& x0, std::vector<double> radii,
                              const StructuralParams& params, const ThieleSpec& thiele, double u_tol) {
  const PositivitySet set = positivity_set(u, u_tol);
  require_free_boundary_point(set, u.grid, x0);
  double target = compute_beta(params);
  if (thiele.variant() == ThieleSpec::Variant::henon && thiele.dist_to_set(x0) <= fb_reach(u.grid))
    target = compute_beta_henon(params, thiele.henon_alpha());

  std::vector<double> skipped;
  const auto keep = admissible(u.grid, x0, std::move(radii), skipped);
  std::vector<double> sups;
  for (double r : keep) sups.push_back(ball_sup(u, x0, r));
  if (sups.empty() || sups.front() < 10.0 * u_tol)
    throw Error(ErrorKind::InsufficientSignal, "signal on the smallest ball is below 10 u_tol");
  FitReport out = log_log_fit(keep, sups, target);
  out.skipped = skipped;
  return out;
}

NondegeneracyReport check_nondegeneracy(const SolutionField& u, const Point& x0, std::vector<double> radii,
                                        const StructuralParams& params, double lambda0, double u_tol) {
  const double cnd = compute_cnd(params, lambda0);
  const double beta = compute_beta(params);
  const PositivitySet set = positivity_set(u, u_tol);
  const Index k0 = u.grid.nearest_node(x0);
  const bool on_positive = (u.grid.position(k0) - x0).norm() < 1e-9 * u.grid.h() && u.values[k0] > u_tol;
  if (!on_positive && distance_to_free_boundary(set, x0) > fb_reach(u.grid))
    throw Error(ErrorKind::InsufficientSignal, "x0 is not in the closure of the positivity set");
  std::vector<double> skipped;
  NondegeneracyReport out;
  out.radii = admissible(u.grid, x0, std::move(radii), skipped);
  if (out.radii.empty()) throw Error(ErrorKind::InsufficientSignal, "no admissible radius");
  out.min_ratio = kInf;
  for (double r : out.radii) {
    const double s = ball_sup(u, x0, r);
    out.sups.push_back(s);
    out.ratios.push_back(s / (cnd * std::pow(r, beta)));
    out.min_ratio = std::min(out.min_ratio, out.ratios.back());
  }
  return out;
}

DensityReport measure_density(const SolutionField& u, const Point& x0, std::vector<double> radii, double u_tol) {
  const PositivitySet set = positivity_set(u, u_tol);
  DensityReport out;
  out.radii = admissible(u.grid, x0, std::move(radii), out.skipped);
  out.min_theta = out.radii.empty() ? 0.0 : 1.0;
  for (double r : out.radii) {
    const auto nodes = ball_nodes(u.grid, x0, r);
    long pos = 0;
    for (Index k : nodes) pos += set.positive[static_cast<std::size_t>(k)];
    const double th = nodes.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(nodes.size());
    out.theta.push_back(th);
    out.min_theta = std::min(out.min_theta, th);
  }
  return out;
}

PorosityReport estimate_porosity(const SolutionField& u, std::vector<double> radii, double u_tol) {
  const GridDomain& grid = u.grid;
  const PositivitySet set = positivity_set(u, u_tol);
  if (!set.has_free_boundary()) throw Error(ErrorKind::NoFreeBoundary, "free boundary is empty");
  if (radii.empty()) throw Error(ErrorKind::InvalidArgument, "porosity needs radii");
  const Eigen::VectorXd dist = free_boundary_distance_field(grid, set);

  PorosityReport out;
  out.delta_overall_min = kInf;
  for (double r : radii) {
    std::vector<double> deltas(set.cell_centers.size(), -1.0);
    const long cells = static_cast<long>(set.cell_centers.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long c = 0; c < cells; ++c) {
      const Point& z = set.cell_centers[static_cast<std::size_t>(c)];
      if (!ball_inside(grid, z, r)) continue;
      double best = 0.0;
      for (Index k : ball_nodes(grid, z, r)) {
        const double room = std::min(r - (grid.position(k) - z).norm(), dist[k]);
        best = std::max(best, room);
      }
      deltas[static_cast<std::size_t>(c)] = std::min(best / r, 0.5);
    }
    std::vector<double> used;
    for (double d : deltas)
      if (d >= 0.0) used.push_back(d);
    out.radii.push_back(r);
    out.cells_used.push_back(static_cast<long>(used.size()));
    out.delta_min.push_back(used.empty() ? 0.0 : *std::min_element(used.begin(), used.end()));
    out.delta_median.push_back(median(used));
    if (!used.empty()) out.delta_overall_min = std::min(out.delta_overall_min, out.delta_min.back());
  }
  if (out.delta_overall_min == kInf) out.delta_overall_min = 0.0;
  return out;
}

FitReport fit_gradient_decay(const SolutionField& u, const Point& x0, std::vector<double> radii,
                             const StructuralParams& params, double u_tol) {
  if (!(params.gamma > 0.0)) throw Error(ErrorKind::NotApplicable, "gradient decay needs gamma > 0");
  const PositivitySet set = positivity_set(u, u_tol);
  require_free_boundary_point(set, u.grid, x0);
  const double target = (1.0 + params.m) / (params.gamma + 1.0 - params.m);
  std::vector<double> skipped;
  const auto keep = admissible(u.grid, x0, std::move(radii), skipped);
  std::vector<double> sups;
  for (double r : keep) {
    double s = 0.0;
    for (Index k : ball_nodes(u.grid, x0, r))
      if (u.grid.is_interior(k) && has_full_stencil(u.grid, k))
        s = std::max(s, discrete_jet(u.grid, u.values, k).grad.norm());
    sups.push_back(s);
  }
  if (sups.empty() || sups.front() < 10.0 * u_tol / u.grid.h())
    throw Error(ErrorKind::InsufficientSignal, "gradient signal on the smallest ball is too weak");
  FitReport out = log_log_fit(keep, sups, target);
  out.skipped = skipped;
  return out;
}

L2AverageReport l2_hessian_average(const SolutionField& u, const Point& x0, std::vector<double> radii,
                                   const StructuralParams& params, double u_tol) {
  if (!(params.gamma > 0.0)) throw Error(ErrorKind::NotApplicable, "the L2 estimate needs gamma > 0");
  const PositivitySet set = positivity_set(u, u_tol);
  require_free_boundary_point(set, u.grid, x0);
  L2AverageReport out;
  out.target = params.gamma * params.m / (params.gamma + 1.0 - params.m);
  for (double r : admissible(u.grid, x0, std::move(radii), out.skipped)) {
    double sum = 0.0;
    long count = 0;
    for (Index k : ball_nodes(u.grid, x0, r)) {
      if (!u.grid.is_interior(k) || !has_full_stencil(u.grid, k)) continue;
      const Jet j = discrete_jet(u.grid, u.values, k);
      const double q = std::pow(j.grad.norm(), params.gamma) * j.hess.norm();
      sum += q * q;
      ++count;
    }
    if (count == 0) {
      out.skipped.push_back(r);
      continue;
    }
    out.radii.push_back(r);
    out.S.push_back(std::sqrt(sum / static_cast<double>(count)));
  }
  if (out.radii.empty()) throw Error(ErrorKind::InsufficientSignal, "no radius with Hessian data");
  const double rmax = out.radii.back();
  out.bound = out.S.back() / std::pow(rmax, out.target);
  out.bound_holds = true;
  for (std::size_t i = 0; i < out.radii.size(); ++i)
    if (out.S[i] > out.bound * std::pow(out.radii[i], out.target) * (1.0 + 1e-12)) out.bound_holds = false;
  out.slope = log_log_fit(out.radii, out.S, out.target).exponent;
  out.slope_ok = out.slope >= out.target - 0.1;
  return out;
}

DistanceReport distance_bounds(const SolutionField& u, const StructuralParams& params, double u_tol) {
  const double beta = compute_beta(params);
  const PositivitySet set = positivity_set(u, u_tol);
  if (set.positive_nodes.empty()) throw Error(ErrorKind::InsufficientSignal, "positivity set is empty");
  if (!set.has_free_boundary()) throw Error(ErrorKind::NoFreeBoundary, "free boundary is empty");
  const Eigen::VectorXd dist = free_boundary_distance_field(u.grid, set);
  DistanceReport out;
  out.max_ratio = 0.0;
  out.min_ratio = kInf;
  const double far = 4.0 * u.grid.h() * (1.0 - 1e-12);
  for (Index k : set.positive_nodes) {
    const double ratio = u.values[k] / std::pow(dist[k], beta);
    out.max_ratio = std::max(out.max_ratio, ratio);
    ++out.nodes;
    if (dist[k] >= far) {
      out.min_ratio = std::min(out.min_ratio, ratio);
      ++out.far_nodes;
    }
  }
  if (out.far_nodes == 0) throw Error(ErrorKind::DomainTooCoarse, "no positive node at distance 4h from the free boundary");
  return out;
}

}  // namespace deadcore
