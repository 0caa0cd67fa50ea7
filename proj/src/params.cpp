#include "deadcore/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "deadcore/errors.hpp"

namespace deadcore {

namespace {

double critical_slack(const StructuralParams& params) {
  return 1e-12 * (1.0 + std::abs(params.gamma));
}

void require_subcritical(const StructuralParams& params) {
  validate(params);
  if (params.critical()) {
    throw Error(ErrorKind::CriticalRegime, "m = gamma + 1: beta is undefined, the strong maximum principle applies");
  }
}

// Shared core of c_{n,gamma,m,p} and C_ND.
double profile_coefficient(const StructuralParams& params, double beta, double lambda) {
  const double gap = params.gamma + 1.0 - params.m;
  const double bracket = params.n - 1 + (params.p - 1.0) * (beta - 1.0);
  if (!(bracket > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "non-positive radial bracket n-1+(p-1)(beta-1)");
  }
  return std::pow(beta, -(params.gamma + 1.0) / gap) * std::pow(lambda / bracket, 1.0 / gap);
}

}  // namespace

StructuralParams StructuralParams::make(int n, double p, double gamma, double m) {
  StructuralParams params{n, p, gamma, m};
  validate(params);
  return params;
}

bool StructuralParams::critical() const {
  return std::abs(m - (gamma + 1.0)) <= critical_slack(*this);
}

void validate(const StructuralParams& params) {
  std::ostringstream why;
  if (params.n < 1) why << "dimension n must be >= 1; ";
  if (!(params.p > 1.0)) why << "p must exceed 1; ";
  if (!(params.gamma > -1.0)) why << "gamma must exceed -1; ";
  if (!(params.m >= 0.0)) why << "m must be non-negative; ";
  if (params.m > params.gamma + 1.0 + critical_slack(params)) why << "m must not exceed gamma + 1; ";
  const auto msg = why.str();
  if (!msg.empty()) throw Error(ErrorKind::InvalidParams, msg);
}

double compute_beta(const StructuralParams& params) {
  require_subcritical(params);
  return (params.gamma + 2.0) / (params.gamma + 1.0 - params.m);
}

double compute_radial_constant(const StructuralParams& params) {
  return profile_coefficient(params, compute_beta(params), 1.0);
}

double compute_cnd(const StructuralParams& params, double lambda0) {
  if (!(lambda0 > 0.0)) throw Error(ErrorKind::InvalidParams, "Thiele lower bound lambda0 must be positive");
  return profile_coefficient(params, compute_beta(params), lambda0);
}

double compute_beta_henon(const StructuralParams& params, double alpha) {
  require_subcritical(params);
  if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidParams, "Henon exponent alpha must be non-negative");
  return (params.gamma + 2.0 + alpha) / (params.gamma + 1.0 - params.m);
}

double henon_profile_constant(const StructuralParams& params, double weight, double alpha) {
  if (!(weight > 0.0)) throw Error(ErrorKind::InvalidParams, "Henon weight must be positive");
  return profile_coefficient(params, compute_beta_henon(params, alpha), weight);
}

double power_barrier_bound(const StructuralParams& params, double lambda0) {
  require_subcritical(params);
  if (!(lambda0 > 0.0)) throw Error(ErrorKind::InvalidParams, "Thiele lower bound lambda0 must be positive");
  const double gap = 1.0 + params.gamma - params.m;
  const double num = std::pow(gap, 2.0 + params.gamma) * lambda0;
  const double den = std::pow(2.0 + params.gamma, 1.0 + params.gamma) *
                     (gap * (params.n - 1) + (params.p - 1.0) * (1.0 + params.m));
  return std::pow(num / den, 1.0 / gap);
}

GameWeights compute_game_weights(const StructuralParams& params) {
  validate(params);
  if (params.p < 2.0) {
    throw Error(ErrorKind::UnsupportedGameRange, "tug-of-war weights require p >= 2");
  }
  const double alpha0 = (params.p - 2.0) / (params.p + params.n);
  return {alpha0, 1.0 - alpha0};
}

// ThieleSpec -----------------------------------------------------------------

ThieleSpec ThieleSpec::constant(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidParams, "constant Thiele modulus must be positive and finite");
  }
  ThieleSpec spec;
  spec.variant_ = Variant::constant;
  spec.lambda0_ = lambda;
  spec.Lambda0_ = lambda;
  return spec;
}

ThieleSpec ThieleSpec::field(std::function<double(const Point&)> a, double lambda0, double Lambda0) {
  if (!(lambda0 > 0.0) || !(Lambda0 >= lambda0) || !std::isfinite(Lambda0)) {
    throw Error(ErrorKind::InvalidParams, "Thiele bounds must satisfy 0 < lambda0 <= Lambda0 < inf");
  }
  ThieleSpec spec;
  spec.variant_ = Variant::field;
  spec.lambda0_ = lambda0;
  spec.Lambda0_ = Lambda0;
  spec.field_ = std::move(a);
  return spec;
}

ThieleSpec ThieleSpec::henon(double weight, double alpha, std::vector<Point> set) {
  if (!(weight > 0.0)) throw Error(ErrorKind::InvalidParams, "Henon weight must be positive");
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidParams, "Henon exponent alpha must be positive");
  if (set.empty()) throw Error(ErrorKind::InvalidParams, "Henon set F must be non-empty");
  ThieleSpec spec;
  spec.variant_ = Variant::henon;
  spec.lambda0_ = 0.0;
  spec.Lambda0_ = std::numeric_limits<double>::infinity();
  spec.weight_ = weight;
  spec.alpha_ = alpha;
  spec.set_ = std::move(set);
  return spec;
}

double ThieleSpec::dist_to_set(const Point& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : set_) best = std::min(best, (x - f).norm());
  return best;
}

double ThieleSpec::operator()(const Point& x) const {
  switch (variant_) {
    case Variant::constant:
      return lambda0_;
    case Variant::henon:
      return weight_ * std::pow(dist_to_set(x), alpha_);
    case Variant::field: {
      const double a = field_(x);
      if (!(a >= lambda0_ && a <= Lambda0_)) {
        throw Error(ErrorKind::InvalidParams, "Thiele field value outside [lambda0, Lambda0]");
      }
      return a;
    }
  }
  return lambda0_;
}

ThieleSpec ThieleSpec::scaled(double factor, double rho) const {
  if (!(factor > 0.0) || !(rho > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "scaling factor and radius must be positive");
  }
  switch (variant_) {
    case Variant::constant:
      return constant(factor * lambda0_);
    case Variant::henon: {
      // w dist(rho x, F)^alpha = w rho^alpha dist(x, F / rho)^alpha
      std::vector<Point> set;
      set.reserve(set_.size());
      for (const auto& f : set_) set.push_back(f / rho);
      return henon(factor * weight_ * std::pow(rho, alpha_), alpha_, std::move(set));
    }
    case Variant::field: {
      auto inner = field_;
      return field([inner, factor, rho](const Point& x) { return factor * inner(rho * x); },
                   factor * lambda0_, factor * Lambda0_);
    }
  }
  return *this;
}

// Derived quantities ---------------------------------------------------------

DerivedExponents derive_exponents(const StructuralParams& params, const ThieleSpec& thiele) {
  DerivedExponents out;
  out.beta = compute_beta(params);
  out.c_rad = compute_radial_constant(params);
  if (thiele.lambda0() > 0.0) out.c_nd = compute_cnd(params, thiele.lambda0());
  const double gap = params.gamma + 1.0 - params.m;
  out.grad_exp = (1.0 + params.m) / gap;
  out.l2_exp = params.gamma * params.m / gap;
  if (thiele.variant() == ThieleSpec::Variant::henon) {
    out.beta_henon = compute_beta_henon(params, thiele.henon_alpha());
  }
  return out;
}

ProblemSpec::ProblemSpec(StructuralParams params, ThieleSpec thiele, BoundaryData boundary)
    : params_(params), thiele_(std::move(thiele)), boundary_(std::move(boundary)) {
  validate(params_);
  if (!boundary_) throw Error(ErrorKind::InvalidArgument, "boundary data must be callable");
  if (!params_.critical()) derived_ = derive_exponents(params_, thiele_);
}

const DerivedExponents& ProblemSpec::exponents() const {
  if (!derived_) throw Error(ErrorKind::CriticalRegime, "derived exponents are undefined for m = gamma + 1");
  return *derived_;
}

}  // namespace deadcore
