#pragma once

#include <optional>
#include <vector>

#include "deadcore/types.hpp"

namespace deadcore {

/// Structural exponents of |grad u|^gamma * Delta_p^N u = a(x) u_+^m.
struct StructuralParams {
  int n = 2;
  double p = 2.0;
  double gamma = 0.0;
  double m = 0.0;

  /// Validating constructor; throws InvalidParams outside the admissible set.
  static StructuralParams make(int n, double p, double gamma, double m);

  /// m == gamma + 1: the strong-maximum-principle regime where beta is undefined.
  bool critical() const;
};

/// Throws InvalidParams unless p > 1, gamma > -1 and 0 <= m <= gamma + 1.
void validate(const StructuralParams& params);

double compute_beta(const StructuralParams& params);
double compute_radial_constant(const StructuralParams& params);
double compute_cnd(const StructuralParams& params, double lambda0);

/// Exponent (gamma + 2 + alpha) / (gamma + 1 - m) at points where a Henon
/// weight dist(x, F)^alpha vanishes.
double compute_beta_henon(const StructuralParams& params, double alpha);

/// Coefficient c of the exact profile c * dist(x, x0)^beta_henon for the
/// modulus weight * |x - x0|^alpha (single-point F, n dimensions).
double henon_profile_constant(const StructuralParams& params, double weight, double alpha);

/// Largest coefficient for which c|x|^beta stays below the equation when
/// a >= lambda0 (the non-degeneracy comparison function).
double power_barrier_bound(const StructuralParams& params, double lambda0);

struct GameWeights {
  double alpha0 = 0.0;  ///< tug-of-war probability
  double beta0 = 1.0;   ///< random-noise probability
};

/// Tug-of-war-with-noise weights; p < 2 throws UnsupportedGameRange.
GameWeights compute_game_weights(const StructuralParams& params);

/// Thiele modulus a(x). Constant and field variants are bounded between
/// lambda0 and Lambda0; the Henon variant is w * dist(x, F)^alpha and
/// vanishes on the finite set F.
class ThieleSpec {
 public:
  enum class Variant { constant, field, henon };

  static ThieleSpec constant(double lambda);
  static ThieleSpec field(std::function<double(const Point&)> a, double lambda0, double Lambda0);
  static ThieleSpec henon(double weight, double alpha, std::vector<Point> set);

  /// Evaluates a(x). Field values outside [lambda0, Lambda0] throw InvalidParams.
  double operator()(const Point& x) const;

  Variant variant() const { return variant_; }
  double lambda0() const { return lambda0_; }
  double Lambda0() const { return Lambda0_; }
  double henon_weight() const { return weight_; }
  double henon_alpha() const { return alpha_; }
  const std::vector<Point>& henon_set() const { return set_; }
  double dist_to_set(const Point& x) const;

  /// x -> factor * a(rho * x), staying in closed form where possible.
  ThieleSpec scaled(double factor, double rho) const;

 private:
  Variant variant_ = Variant::constant;
  double lambda0_ = 1.0;
  double Lambda0_ = 1.0;
  double weight_ = 0.0;
  double alpha_ = 0.0;
  std::vector<Point> set_;
  std::function<double(const Point&)> field_;
};

struct DerivedExponents {
  double beta = 0.0;
  double c_rad = 0.0;
  std::optional<double> c_nd;        ///< needs lambda0 > 0
  double grad_exp = 0.0;             ///< (1 + m) / (gamma + 1 - m)
  double l2_exp = 0.0;               ///< gamma m / (gamma + 1 - m)
  std::optional<double> beta_henon;  ///< only with a Henon modulus
};

DerivedExponents derive_exponents(const StructuralParams& params, const ThieleSpec& thiele);

/// One PDE instance. Derived exponents are computed once here; in the
/// critical regime they are absent and exponents() throws CriticalRegime.
class ProblemSpec {
 public:
  ProblemSpec(StructuralParams params, ThieleSpec thiele, BoundaryData boundary);

  const StructuralParams& params() const { return params_; }
  const ThieleSpec& thiele() const { return thiele_; }
  const BoundaryData& boundary() const { return boundary_; }
  const DerivedExponents& exponents() const;
  bool critical() const { return params_.critical(); }

 private:
  StructuralParams params_;
  ThieleSpec thiele_;
  BoundaryData boundary_;
  std::optional<DerivedExponents> derived_;
};

}  // namespace deadcore
