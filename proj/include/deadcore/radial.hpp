#pragma once

#include <span>
#include <vector>

#include "deadcore/operators.hpp"
#include "deadcore/params.hpp"

namespace deadcore {

/// c * (|x - x0| - r)_+^beta with analytic derivatives. With c = C_ND(lambda0)
/// and r = 0 (or n = 1) it solves the equation exactly for a == lambda0.
struct RadialDeadCore {
  Point center;
  double core_radius = 0.0;
  double coefficient = 0.0;
  double beta = 2.0;

  /// Profile with coefficient C_ND(params, lambda0).
  static RadialDeadCore make(const StructuralParams& params, double lambda0, const Point& center,
                             double core_radius = 0.0);

  double value(const Point& x) const;
  /// Throws NonSmoothPoint on the core sphere when the Hessian jumps there.
  Jet jet(const Point& x) const;
  BoundaryData as_function() const;
};

FieldSample radial_eval(const RadialDeadCore& profile, const Point& x);

/// c |x|^beta, the comparison function of the non-degeneracy argument.
struct PowerBarrier {
  double coefficient = 0.0;
  double beta = 2.0;

  static PowerBarrier admissible(const StructuralParams& params, double lambda0);
  RadialDeadCore profile(int n) const;
};

/// exp(-a|x|^2) - exp(-a d^2) on the annulus d/2 <= |x| <= d, frozen inside
/// B_{d/2} and zero outside B_d.
struct ExpBarrier {
  double a = 0.0;
  double d = 1.0;

  double kappa0() const;
  /// Lower bound a d exp(-a d^2) of |grad| on the annulus. Not the game weight.
  double gradient_floor() const;
  double value(const Point& x) const;
  Jet jet(const Point& x) const;
};

struct SignReport {
  double min_residual = 0.0;
  std::size_t argmin = 0;
  std::size_t samples = 0;
  bool nonnegative = false;
};

/// |grad Phi|^gamma Delta_p^N Phi - a(x) Phi_+^(1+gamma) over annulus samples
/// (critical regime only).
SignReport exp_barrier_residual_sign(const ExpBarrier& barrier, const StructuralParams& params,
                                     const ThieleSpec& thiele, std::span<const Point> samples);

/// Deterministic points filling d/2 <= |x| <= d.
std::vector<Point> annulus_samples(int n, double d, int count);

/// Smallest a >= 2/d^2 (to bisection accuracy) whose annulus residual is nonnegative.
double calibrate_exp_barrier(double d, const StructuralParams& params, const ThieleSpec& thiele,
                             std::span<const Point> samples);

/// v_R(x) = C_ND [|x| - R (1 - theta^(1/beta))]_+^beta, theta = sup_R / (C_ND R^beta):
/// the radial supersolution on B_R with boundary value sup_R.
struct LiouvilleSupersolution {
  double R = 1.0;
  double boundary_sup = 0.0;
  double c_nd = 0.0;
  double beta = 2.0;

  /// Throws NotApplicable when sup_R > C_ND R^beta.
  static LiouvilleSupersolution make(double sup_R, double R, const StructuralParams& params, double lambda0);

  double theta() const;
  double dead_radius() const;
  double value(const Point& x) const;
};

double liouville_supersolution_eval(double sup_R, double R, const StructuralParams& params, double lambda0,
                                    const Point& x);

}  // namespace deadcore
