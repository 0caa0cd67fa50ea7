#include "deadcore/operators.hpp"

namespace deadcore {

Residual pde_residual(const FieldSample& sample, const Point& x, const StructuralParams& params,
                      const ThieleSpec& thiele, double eps_g) {
  Residual out;
  const auto& g = sample.jet.grad;
  const auto& H = sample.jet.hess;
  const double absorption = thiele(x) * positive_power(sample.value, params.m);
  double lhs = 0.0;
  if (eps_g > 0.0) {
    const double lap = regularized_p_laplacian(g, H, params.p, eps_g);
    lhs = lap == 0.0 ? 0.0 : gradient_power(g, params.gamma, eps_g) * lap;
  } else if (g.norm() > 0.0) {
    lhs = std::pow(g.norm(), params.gamma) * normalized_p_laplacian(g, H, params.p);
  } else if (params.gamma > 0.0) {
    lhs = 0.0;  // bounded operator times a vanishing weight
  } else {
    const auto [lo, hi] = zero_gradient_bracket(H, params.p);
    out.singular = params.gamma < 0.0 || lo != hi;
    const double lap = 0.5 * (lo + hi);
    lhs = lap == 0.0 ? 0.0 : (params.gamma < 0.0 ? std::copysign(HUGE_VAL, lap) : lap);
  }
  out.value = lhs - absorption;
  return out;
}

bool has_full_stencil(const GridDomain& grid, Index node) {
  const auto [i, j] = grid.coords(node);
  const int jspan = grid.dim() == 2 ? 1 : 0;
  for (int dj = -jspan; dj <= jspan; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int ii = i + di, jj = j + dj;
      if (ii < 0 || jj < 0 || ii >= grid.nx() || jj >= grid.ny()) return false;
      if (grid.kind(grid.index(ii, jj)) == NodeKind::outside) return false;
    }
  }
  return true;
}

Jet discrete_jet(const GridDomain& grid, const Eigen::VectorXd& values, Index node) {
  if (!has_full_stencil(grid, node)) {
    throw Error(ErrorKind::StencilOutOfDomain, "node lacks a full difference stencil");
  }
  const double h = grid.h();
  const auto [i, j] = grid.coords(node);
  auto u = [&](int di, int dj) { return values[grid.index(i + di, j + dj)]; };
  Jet jet = Jet::zero(grid.dim());
  jet.grad[0] = (u(1, 0) - u(-1, 0)) / (2 * h);
  jet.hess(0, 0) = (u(1, 0) - 2 * u(0, 0) + u(-1, 0)) / (h * h);
  if (grid.dim() == 2) {
    jet.grad[1] = (u(0, 1) - u(0, -1)) / (2 * h);
    jet.hess(1, 1) = (u(0, 1) - 2 * u(0, 0) + u(0, -1)) / (h * h);
    const double mixed = (u(1, 1) - u(-1, 1) - u(1, -1) + u(-1, -1)) / (4 * h * h);
    jet.hess(0, 1) = mixed;
    jet.hess(1, 0) = mixed;
  }
  return jet;
}

}  // namespace deadcore
