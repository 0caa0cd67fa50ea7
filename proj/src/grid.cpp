#include "deadcore/grid.hpp"

#include <limits>
#include <algorithm>
#include <cmath>

#include "deadcore/errors.hpp"

namespace deadcore {

namespace {

constexpr double kSnap = 1e-9;

int lattice_count(double length, double h) {
  const double cells = length / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-7 * std::max(1.0, cells) || rounded < 2) {
    throw Error(ErrorKind::InvalidArgument, "box extent must be a multiple (>= 2) of the spacing h");
  }
  return static_cast<int>(rounded);
}

}  // namespace

GridDomain GridDomain::box(const Point& lo, const Point& hi, double h, int halo) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 2) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1 or 2");
  }
  if (!(h > 0.0) || halo < 0) throw Error(ErrorKind::InvalidArgument, "spacing must be positive");
  GridDomain g;
  g.dim_ = static_cast<int>(lo.size());
  g.shape_ = DomainShape::box;
  g.h_ = h;
  g.halo_ = halo;
  g.lo_ = lo;
  g.hi_ = hi;
  g.center_ = 0.5 * (lo + hi);
  g.origin_ = lo.array() - halo * h;
  for (int d = 0; d < g.dim_; ++d) g.extent_[d] = lattice_count(hi[d] - lo[d], h) + 1 + 2 * halo;
  g.classify();
  return g;
}

GridDomain GridDomain::ball(const Point& center, double radius, double h, int halo) {
  if (center.size() < 1 || center.size() > 2) throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1 or 2");
  if (!(h > 0.0) || !(radius > 2.0 * h) || halo < 0) {
    throw Error(ErrorKind::InvalidArgument, "ball radius must exceed two grid spacings");
  }
  GridDomain g;
  g.dim_ = static_cast<int>(center.size());
  g.shape_ = DomainShape::ball;
  g.h_ = h;
  g.halo_ = halo;
  g.center_ = center;
  g.radius_ = radius;
  g.lo_ = center.array() - radius;
  g.hi_ = center.array() + radius;
  const int half = static_cast<int>(std::ceil(radius / h - kSnap)) + halo + 1;
  g.origin_ = center.array() - half * h;
  for (int d = 0; d < g.dim_; ++d) g.extent_[d] = 2 * half + 1;
  g.classify();
  return g;
}

Point GridDomain::position(Index k) const {
  const auto [i, j] = coords(k);
  Point x(dim_);
  x[0] = origin_[0] + i * h_;
  if (dim_ == 2) x[1] = origin_[1] + j * h_;
  return x;
}

bool GridDomain::contains(const Point& x) const { return dist_outside(x) <= kSnap * h_; }

double GridDomain::dist_outside(const Point& x) const {
  if (shape_ == DomainShape::ball) return std::max(0.0, (x - center_).norm() - radius_);
  const Point clamped = x.cwiseMax(lo_).cwiseMin(hi_);
  return (x - clamped).norm();
}

double GridDomain::dist_to_surface(const Point& x) const {
  if (shape_ == DomainShape::ball) return std::max(0.0, radius_ - (x - center_).norm());
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dim_; ++k) d = std::min({d, x[k] - lo_[k], hi_[k] - x[k]});
  return std::max(0.0, d);
}

double GridDomain::diameter() const { return (hi_ - lo_).norm(); }

void GridDomain::classify() {
  const Index total = size();
  kinds_.assign(static_cast<std::size_t>(total), NodeKind::outside);
  auto strictly_inside = [&](const Point& x) {
    if (shape_ == DomainShape::ball) return (x - center_).norm() < radius_ - kSnap * h_;
    for (int k = 0; k < dim_; ++k) {
      if (!(x[k] > lo_[k] + kSnap * h_ && x[k] < hi_[k] - kSnap * h_)) return false;
    }
    return true;
  };
  for (Index k = 0; k < total; ++k) {
    if (strictly_inside(position(k))) kinds_[static_cast<std::size_t>(k)] = NodeKind::interior;
  }
  const int jspan = dim_ == 2 ? 1 : 0;
  for (Index k = 0; k < total; ++k) {
    if (kinds_[static_cast<std::size_t>(k)] == NodeKind::interior) continue;
    bool boundary = dist_outside(position(k)) <= halo_ * h_ + kSnap * h_;
    const auto [i, j] = coords(k);
    for (int dj = -jspan; dj <= jspan && !boundary; ++dj) {
      for (int di = -1; di <= 1 && !boundary; ++di) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || jj < 0 || ii >= extent_[0] || jj >= extent_[1]) continue;
        boundary = kinds_[static_cast<std::size_t>(index(ii, jj))] == NodeKind::interior;
      }
    }
    if (boundary) kinds_[static_cast<std::size_t>(k)] = NodeKind::boundary;
  }
  interior_.clear();
  boundary_.clear();
  colours_.assign(dim_ == 2 ? 4 : 2, {});
  for (Index k = 0; k < total; ++k) {
    switch (kinds_[static_cast<std::size_t>(k)]) {
      case NodeKind::interior: {
        interior_.push_back(k);
        const auto [i, j] = coords(k);
        colours_[static_cast<std::size_t>((i % 2) + (dim_ == 2 ? 2 * (j % 2) : 0))].push_back(k);
        break;
      }
      case NodeKind::boundary:
        boundary_.push_back(k);
        break;
      case NodeKind::outside:
        break;
    }
  }
  for (Index k : interior_) {
    const auto [i, j] = coords(k);
    if (i == 0 || i + 1 >= extent_[0] || (dim_ == 2 && (j == 0 || j + 1 >= extent_[1]))) {
      throw Error(ErrorKind::InvalidArgument, "interior node touches the lattice edge");
    }
  }
}

Index GridDomain::nearest_node(const Point& x) const {
  int ij[2] = {0, 0};
  for (int d = 0; d < dim_; ++d) {
    const long v = std::lround((x[d] - origin_[d]) / h_);
    ij[d] = static_cast<int>(std::clamp<long>(v, 0, extent_[d] - 1));
  }
  return index(ij[0], ij[1]);
}

double GridDomain::interpolate(const Eigen::VectorXd& values, const Point& x) const {
  if (x.size() != dim_) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
  int base[2] = {0, 0};
  double frac[2] = {0.0, 0.0};
  for (int d = 0; d < dim_; ++d) {
    const double s = (x[d] - origin_[d]) / h_;
    if (s < -kSnap || s > extent_[d] - 1 + kSnap) throw Error(ErrorKind::InvalidArgument, "point outside the lattice");
    int b = static_cast<int>(std::floor(s));
    b = std::clamp(b, 0, extent_[d] - 2);
    base[d] = b;
    frac[d] = std::clamp(s - b, 0.0, 1.0);
  }
  double acc = 0.0;
  const int jcorners = dim_ == 2 ? 2 : 1;
  for (int dj = 0; dj < jcorners; ++dj) {
    for (int di = 0; di < 2; ++di) {
      const double w = (di ? frac[0] : 1.0 - frac[0]) * (dim_ == 2 ? (dj ? frac[1] : 1.0 - frac[1]) : 1.0);
      if (w == 0.0) continue;
      const Index k = index(base[0] + di, base[1] + dj);
      if (kind(k) == NodeKind::outside) throw Error(ErrorKind::InvalidArgument, "interpolation touches an outside node");
      acc += w * values[k];
    }
  }
  return acc;
}

std::optional<GridDomain> GridDomain::coarsened() const {
  const double H = 2.0 * h_;
  try {
    if (shape_ == DomainShape::ball) {
      if (!(radius_ > 4.0 * H)) return std::nullopt;
      return ball(center_, radius_, H, (halo_ + 1) / 2);
    }
    for (int d = 0; d < dim_; ++d) {
      const long cells = std::lround((hi_[d] - lo_[d]) / h_);
      if (cells % 2 != 0 || cells / 2 < 8) return std::nullopt;
    }
    return box(lo_, hi_, H, (halo_ + 1) / 2);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool GridDomain::same_layout(const GridDomain& other) const {
  return dim_ == other.dim_ && shape_ == other.shape_ && extent_ == other.extent_ &&
         std::abs(h_ - other.h_) <= kSnap * h_ && (origin_ - other.origin_).norm() <= kSnap * h_ &&
         kinds_ == other.kinds_;
}

Eigen::VectorXd GridDomain::sample(const BoundaryData& g) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (Index k = 0; k < size(); ++k) {
    if (kind(k) != NodeKind::outside) out[k] = g(position(k));
  }
  return out;
}

}  // namespace deadcore
