#pragma once

#include <Eigen/Dense>
#include <functional>

namespace deadcore {

/// Points live in R^n with n in {1, 2}; dynamic size keeps one type for both.
using Point = Eigen::VectorXd;
using Index = Eigen::Index;

/// Boundary datum g (or game payoff F), evaluated at node positions.
using BoundaryData = std::function<double(const Point&)>;

inline Point make_point(double x) { return Point::Constant(1, x); }
inline Point make_point(double x, double y) { return Point{{x, y}}; }

}  // namespace deadcore
