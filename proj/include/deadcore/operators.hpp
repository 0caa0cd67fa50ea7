#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <utility>

#include "deadcore/errors.hpp"
#include "deadcore/grid.hpp"
#include "deadcore/params.hpp"

namespace deadcore {

/// First and second derivatives of a field at one point.
template <typename Scalar>
struct PointJet {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector grad;
  Matrix hess;

  static PointJet zero(int n) { return {Vector::Zero(n), Matrix::Zero(n, n)}; }
};

using Jet = PointJet<double>;

template <typename Scalar>
struct EllipticityBounds {
  Scalar lambda_N;
  Scalar Lambda_N;
};

/// Pucci constants sandwiching Delta_p^N: min{1, p-1} and max{1, p-1}.
template <typename Scalar>
EllipticityBounds<Scalar> ellipticity_bounds(Scalar p) {
  return {std::min(Scalar(1), p - Scalar(1)), std::max(Scalar(1), p - Scalar(1))};
}

template <typename DerivedG, typename DerivedH>
typename DerivedG::Scalar normalized_inf_laplacian(const Eigen::MatrixBase<DerivedG>& grad,
                                                   const Eigen::MatrixBase<DerivedH>& hess) {
  using Scalar = typename DerivedG::Scalar;
  const Scalar norm = grad.norm();
  if (!(norm > Scalar(0))) throw Error(ErrorKind::VanishingGradient, "normalized infinity-Laplacian at |grad| = 0");
  const auto dir = (grad / norm).eval();
  return dir.dot(hess * dir);
}

template <typename DerivedG, typename DerivedH>
typename DerivedG::Scalar normalized_p_laplacian(const Eigen::MatrixBase<DerivedG>& grad,
                                                 const Eigen::MatrixBase<DerivedH>& hess,
                                                 typename DerivedG::Scalar p) {
  return hess.trace() + (p - 2) * normalized_inf_laplacian(grad, hess);
}

template <typename Scalar>
Scalar normalized_inf_laplacian(const PointJet<Scalar>& jet) {
  return normalized_inf_laplacian(jet.grad, jet.hess);
}

template <typename Scalar>
Scalar normalized_p_laplacian(const PointJet<Scalar>& jet, Scalar p) {
  return normalized_p_laplacian(jet.grad, jet.hess, p);
}

/// Delta_p^N with the direction g / sqrt(|g|^2 + eps^2); eps = 0 is the exact operator.
template <typename DerivedG, typename DerivedH>
typename DerivedG::Scalar regularized_p_laplacian(const Eigen::MatrixBase<DerivedG>& grad,
                                                  const Eigen::MatrixBase<DerivedH>& hess,
                                                  typename DerivedG::Scalar p,
                                                  typename DerivedG::Scalar eps) {
  using Scalar = typename DerivedG::Scalar;
  if (eps == Scalar(0)) return normalized_p_laplacian(grad, hess, p);
  const auto dir = (grad / std::sqrt(grad.squaredNorm() + eps * eps)).eval();
  return hess.trace() + (p - 2) * dir.dot(hess * dir);
}

/// (|g|^2 + eps^2)^(gamma/2).
template <typename DerivedG>
typename DerivedG::Scalar gradient_power(const Eigen::MatrixBase<DerivedG>& grad,
                                         typename DerivedG::Scalar gamma,
                                         typename DerivedG::Scalar eps) {
  using std::pow;
  return pow(grad.squaredNorm() + eps * eps, gamma / 2);
}

template <typename DerivedH>
Eigen::Matrix<typename DerivedH::Scalar, Eigen::Dynamic, 1> symmetric_eigenvalues(
    const Eigen::MatrixBase<DerivedH>& hess) {
  using Scalar = typename DerivedH::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = hess.rows();
  const Scalar scale = std::max(Scalar(1), hess.cwiseAbs().maxCoeff());
  if (hess.cols() != n || (hess - hess.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw Error(ErrorKind::InvalidArgument, "matrix is not symmetric");
  }
  if (n == 1) return Vector::Constant(1, hess(0, 0));
  if (n == 2) {
    const Scalar mean = (hess(0, 0) + hess(1, 1)) / 2;
    const Scalar half_diff = (hess(0, 0) - hess(1, 1)) / 2;
    const Scalar radius = std::hypot(half_diff, hess(0, 1));
    Vector ev(2);
    ev << mean - radius, mean + radius;
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(
      hess, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

enum class PucciSign { minus, plus };

/// Pucci extremal operators over matrices with eigenvalues in [lambda, Lambda].
template <typename DerivedH>
typename DerivedH::Scalar pucci(const Eigen::MatrixBase<DerivedH>& hess, typename DerivedH::Scalar lambda,
                                typename DerivedH::Scalar Lambda, PucciSign sign) {
  using Scalar = typename DerivedH::Scalar;
  if (!(lambda > Scalar(0)) || !(Lambda >= lambda)) {
    throw Error(ErrorKind::InvalidArgument, "Pucci constants must satisfy 0 < lambda <= Lambda");
  }
  const auto ev = symmetric_eigenvalues(hess);
  const Scalar pos = ev.cwiseMax(Scalar(0)).sum();
  const Scalar neg = ev.cwiseMin(Scalar(0)).sum();
  return sign == PucciSign::minus ? lambda * pos + Lambda * neg : Lambda * pos + lambda * neg;
}

/// Range of Tr[(I + (p-2) e (x) e) H] over unit e: the values the viscosity
/// definition may select when the gradient vanishes.
template <typename DerivedH>
std::pair<typename DerivedH::Scalar, typename DerivedH::Scalar> zero_gradient_bracket(
    const Eigen::MatrixBase<DerivedH>& hess, typename DerivedH::Scalar p) {
  const auto ev = symmetric_eigenvalues(hess);
  const auto a = hess.trace() + (p - 2) * ev.minCoeff();
  const auto b = hess.trace() + (p - 2) * ev.maxCoeff();
  return {std::min(a, b), std::max(a, b)};
}

/// u_+^m with the indicator convention u_+^0 = 1{u > 0}.
inline double positive_power(double u, double m) {
  if (!(u > 0.0)) return 0.0;
  return m == 0.0 ? 1.0 : std::pow(u, m);
}

struct FieldSample {
  double value = 0.0;
  Jet jet;
};

struct Residual {
  double value = 0.0;
  bool singular = false;  ///< gamma < 0 (or p != 2) evaluated at a vanishing gradient
};

/// |grad u|^gamma Delta_p^N u - a(x) u_+^m at x. With eps_g > 0 the
/// regularized direction and weight are used everywhere; with eps_g = 0 the
/// exact operator is used away from critical points.
Residual pde_residual(const FieldSample& sample, const Point& x, const StructuralParams& params,
                      const ThieleSpec& thiele, double eps_g = 0.0);

/// True when every node of the 3^n neighbourhood of `node` carries data.
bool has_full_stencil(const GridDomain& grid, Index node);

/// Second-order central differences: gradient, second differences and the
/// symmetric 4-point mixed derivative. Throws StencilOutOfDomain near the lattice edge.
Jet discrete_jet(const GridDomain& grid, const Eigen::VectorXd& values, Index node);

}  // namespace deadcore
