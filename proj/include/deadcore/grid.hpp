#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "deadcore/types.hpp"

namespace deadcore {

enum class DomainShape { box, ball };
enum class NodeKind : std::uint8_t { interior, boundary, outside };

/// Uniform Cartesian lattice (n = 1 or 2) carrying an axis-aligned box or a
/// ball. Interior nodes lie strictly inside the domain; boundary nodes are
/// the non-interior nodes that either sit in an interior node's 3^n
/// neighbourhood or lie within `halo` layers of the domain (the exterior
/// strip used by mean-value iterations). Everything else is `outside`.
class GridDomain {
 public:
  static GridDomain box(const Point& lo, const Point& hi, double h, int halo = 0);
  static GridDomain ball(const Point& center, double radius, double h, int halo = 0);

  int dim() const { return dim_; }
  double h() const { return h_; }
  int halo() const { return halo_; }
  DomainShape shape() const { return shape_; }
  int nx() const { return extent_[0]; }
  int ny() const { return extent_[1]; }
  Index size() const { return static_cast<Index>(extent_[0]) * extent_[1]; }

  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }

  Index index(int i, int j = 0) const { return static_cast<Index>(j) * extent_[0] + i; }
  std::array<int, 2> coords(Index k) const {
    return {static_cast<int>(k % extent_[0]), static_cast<int>(k / extent_[0])};
  }
  Point position(Index k) const;
  NodeKind kind(Index k) const { return kinds_[static_cast<std::size_t>(k)]; }
  bool is_interior(Index k) const { return kind(k) == NodeKind::interior; }

  const std::vector<Index>& interior_nodes() const { return interior_; }
  const std::vector<Index>& boundary_nodes() const { return boundary_; }

  /// Interior nodes split into 2^n colours; a node's 3^n neighbourhood never
  /// contains another node of its own colour.
  const std::vector<std::vector<Index>>& colours() const { return colours_; }

  /// Closed-domain membership and geometry helpers.
  bool contains(const Point& x) const;
  double dist_outside(const Point& x) const;
  /// Distance from an interior point to the domain's boundary surface.
  double dist_to_surface(const Point& x) const;
  double diameter() const;

  /// Nearest lattice node (clamped to the lattice).
  Index nearest_node(const Point& x) const;
  /// Multilinear interpolation of node values; cell corners must not be outside nodes.
  double interpolate(const Eigen::VectorXd& values, const Point& x) const;

  /// Same domain on the lattice with spacing 2h, when it exists.
  std::optional<GridDomain> coarsened() const;
  bool same_layout(const GridDomain& other) const;

  /// Samples g at every interior and boundary node; outside nodes get 0.
  Eigen::VectorXd sample(const BoundaryData& g) const;

 private:
  void classify();

  int dim_ = 2;
  DomainShape shape_ = DomainShape::box;
  double h_ = 0.0;
  int halo_ = 0;
  std::array<int, 2> extent_{1, 1};
  Point origin_;
  Point lo_, hi_;
  Point center_;
  double radius_ = 0.0;
  std::vector<NodeKind> kinds_;
  std::vector<Index> interior_;
  std::vector<Index> boundary_;
  std::vector<std::vector<Index>> colours_;
};

}  // namespace deadcore
