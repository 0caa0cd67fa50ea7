#include "deadcore/radial.hpp"

#include <cmath>
#include <numbers>

namespace deadcore {

RadialDeadCore RadialDeadCore::make(const StructuralParams& params, double lambda0, const Point& center,
                                    double core_radius) {
  if (center.size() != params.n) throw Error(ErrorKind::InvalidArgument, "centre dimension differs from n");
  if (!(core_radius >= 0.0)) throw Error(ErrorKind::InvalidArgument, "core radius must be non-negative");
  return {center, core_radius, compute_cnd(params, lambda0), compute_beta(params)};
}

double RadialDeadCore::value(const Point& x) const {
  const double s = (x - center).norm() - core_radius;
  return s > 0.0 ? coefficient * std::pow(s, beta) : 0.0;
}

Jet RadialDeadCore::jet(const Point& x) const {
  const int n = static_cast<int>(x.size());
  const Point offset = x - center;
  const double rho = offset.norm();
  const double s = rho - core_radius;
  if (s < 0.0) return Jet::zero(n);
  if (s == 0.0) {
    if (beta > 2.0) return Jet::zero(n);
    if (beta == 2.0 && core_radius == 0.0) {
      Jet jet = Jet::zero(n);
      jet.hess = 2.0 * coefficient * Eigen::MatrixXd::Identity(n, n);
      return jet;
    }
    throw Error(ErrorKind::NonSmoothPoint, "Hessian of the profile jumps on the core sphere");
  }
  const Point dir = offset / rho;
  const Eigen::MatrixXd radial = dir * dir.transpose();
  const Eigen::MatrixXd tangential = Eigen::MatrixXd::Identity(n, n) - radial;
  Jet jet;
  jet.grad = coefficient * beta * std::pow(s, beta - 1.0) * dir;
  jet.hess = coefficient * beta * std::pow(s, beta - 2.0) * ((beta - 1.0) * radial + (s / rho) * tangential);
  return jet;
}

BoundaryData RadialDeadCore::as_function() const {
  return [profile = *this](const Point& x) { return profile.value(x); };
}

FieldSample radial_eval(const RadialDeadCore& profile, const Point& x) {
  return {profile.value(x), profile.jet(x)};
}

PowerBarrier PowerBarrier::admissible(const StructuralParams& params, double lambda0) {
  return {power_barrier_bound(params, lambda0), compute_beta(params)};
}

RadialDeadCore PowerBarrier::profile(int n) const {
  return {Point::Zero(n), 0.0, coefficient, beta};
}

// Exponential barrier ---------------------------------------------------------

double ExpBarrier::kappa0() const { return std::exp(-a * d * d); }

double ExpBarrier::gradient_floor() const { return a * d * std::exp(-a * d * d); }

double ExpBarrier::value(const Point& x) const {
  const double rho = x.norm();
  if (rho > d) return 0.0;
  const double r = std::max(rho, 0.5 * d);
  return std::exp(-a * r * r) - kappa0();
}

Jet ExpBarrier::jet(const Point& x) const {
  const int n = static_cast<int>(x.size());
  const double rho = x.norm();
  if (rho < 0.5 * d || rho > d) return Jet::zero(n);
  const double e = std::exp(-a * rho * rho);
  Jet jet;
  jet.grad = -2.0 * a * e * x;
  jet.hess = e * (4.0 * a * a * x * x.transpose() - 2.0 * a * Eigen::MatrixXd::Identity(n, n));
  return jet;
}

std::vector<Point> annulus_samples(int n, double d, int count) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double t = count > 1 ? static_cast<double>(k) / (count - 1) : 0.0;
    const double rho = 0.5 * d * (1.0 + t);
    if (n == 1) {
      out.push_back(make_point(k % 2 == 0 ? rho : -rho));
    } else {
      out.push_back(make_point(rho * std::cos(golden * k), rho * std::sin(golden * k)));
    }
  }
  return out;
}

SignReport exp_barrier_residual_sign(const ExpBarrier& barrier, const StructuralParams& params,
                                     const ThieleSpec& thiele, std::span<const Point> samples) {
  validate(params);
  if (!params.critical()) throw Error(ErrorKind::InvalidParams, "the exponential barrier needs m = gamma + 1");
  if (!(barrier.d > 0.0) || barrier.a < 2.0 / (barrier.d * barrier.d) * (1.0 - 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "barrier needs d > 0 and a >= 2/d^2");
  }
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no annulus samples");
  SignReport report;
  report.samples = samples.size();
  report.min_residual = HUGE_VAL;
  const double slack = 1e-12 * barrier.d;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double rho = samples[k].norm();
    if (rho < 0.5 * barrier.d - slack || rho > barrier.d + slack) {
      throw Error(ErrorKind::InvalidArgument, "sample outside the annulus d/2 <= |x| <= d");
    }
    const FieldSample f{barrier.value(samples[k]), barrier.jet(samples[k])};
    const double r = pde_residual(f, samples[k], params, thiele).value;
    if (r < report.min_residual) {
      report.min_residual = r;
      report.argmin = k;
    }
  }
  report.nonnegative = report.min_residual >= 0.0;
  return report;
}

double calibrate_exp_barrier(double d, const StructuralParams& params, const ThieleSpec& thiele,
                             std::span<const Point> samples) {
  auto ok = [&](double a) { return exp_barrier_residual_sign({a, d}, params, thiele, samples).nonnegative; };
  double lo = 2.0 / (d * d);
  if (ok(lo)) return lo;
  double hi = 2.0 * lo;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6 / (d * d)) throw Error(ErrorKind::NotApplicable, "no barrier rate found below 1e6/d^2");
  }
  for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Liouville supersolution ------------------------------------------------------

LiouvilleSupersolution LiouvilleSupersolution::make(double sup_R, double R, const StructuralParams& params,
                                                    double lambda0) {
  if (!(R > 0.0) || !(sup_R >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need R > 0 and sup_R >= 0");
  LiouvilleSupersolution v{R, sup_R, compute_cnd(params, lambda0), compute_beta(params)};
  if (v.theta() > 1.0 + 1e-12) {
    throw Error(ErrorKind::NotApplicable, "boundary level exceeds C_ND R^beta; growth hypothesis violated");
  }
  return v;
}

double LiouvilleSupersolution::theta() const { return boundary_sup / (c_nd * std::pow(R, beta)); }

double LiouvilleSupersolution::dead_radius() const {
  return R * (1.0 - std::pow(std::min(theta(), 1.0), 1.0 / beta));
}

double LiouvilleSupersolution::value(const Point& x) const {
  const double s = x.norm() - dead_radius();
  return s > 0.0 ? c_nd * std::pow(s, beta) : 0.0;
}

double liouville_supersolution_eval(double sup_R, double R, const StructuralParams& params, double lambda0,
                                    const Point& x) {
  return LiouvilleSupersolution::make(sup_R, R, params, lambda0).value(x);
}

}  // namespace deadcore
