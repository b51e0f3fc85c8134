#include "singell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "diffops.hpp"
#include "errors.hpp"

namespace axbq {

namespace {

EllipticSolution solve_with(const RadialStencil& st, const ScalarField& rhs, double epsilon,
                            SolverBackend backend) {
  AxisymSolver solver(st, 0.0, 1.0, backend);
  SolveResult res = solver.solve(rhs, kEllipticTol);
  EllipticSolution out;
  out.f = std::move(res.x);
  out.residual_l2 = res.residual_l2;
  out.epsilon = epsilon;
  return out;
}

}  // namespace

EllipticSolution op_L(const ScalarField& rho, SolverBackend backend) {
  require_parity(rho, Parity::even, "op_L");
  return solve_with(modified_stencil(rho.grid()), dr_over_r(rho), 0.0, backend);
}

EllipticSolution op_L_regularized(const ScalarField& rho, double epsilon, SolverBackend backend) {
  require_parity(rho, Parity::even, "op_L_regularized");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "op_L_regularized: epsilon must be > 0");
  const GridSpec& g = rho.grid();
  ScalarField rhs = d_r(rho);
  rhs.set_parity(Parity::even);
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    const double w = r / (r * r + epsilon);
    for (int j = 0; j < g.nz; ++j) rhs(i, j) *= w;
  }
  return solve_with(regularized_stencil(g, epsilon), rhs, epsilon, backend);
}

EllipticSolution op_Lz(const ScalarField& sigma, SolverBackend backend) {
  std::vector<std::string> warnings;
  if (sigma.parity() == Parity::even) {
    double axis_max = 0.0;
    double all_max = 0.0;
    for (int j = 0; j < sigma.nz(); ++j) axis_max = std::max(axis_max, std::abs(sigma(0, j)));
    for (double v : sigma.values()) all_max = std::max(all_max, std::abs(v));
    if (axis_max > 1e-8 * std::max(1.0, all_max)) {
      warnings.emplace_back("op_Lz: sigma is even and does not vanish at the axis; (d_z sigma)/r is singular");
    }
  }
  ScalarField rhs = divide_by_r(d_z(sigma));
  rhs.set_parity(Parity::even);
  EllipticSolution out = solve_with(modified_stencil(sigma.grid()), rhs, 0.0, backend);
  out.warnings = std::move(warnings);
  return out;
}

CknResult ckn_check(const ScalarField& f, double p) {
  if (!(p >= 2.0) || std::isinf(p)) throw Error(ErrorCode::invalid_argument, "ckn_check: p must lie in [2, inf)");
  const GridSpec& g = f.grid();
  const ScalarField fr = d_r(f);
  const double cell = 2.0 * std::numbers::pi * g.dr() * g.dz();
  std::vector<double> lhs_terms(g.size()), rhs_terms(g.size());
  std::size_t k = 0;
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    const double w = cell * r;
    for (int j = 0; j < g.nz; ++j, ++k) {
      const double a = std::abs(f(i, j));
      const double ap2 = p == 2.0 ? 1.0 : (a == 0.0 ? 0.0 : std::pow(a, p - 2.0));
      lhs_terms[k] = w * ap2 * a * a;
      rhs_terms[k] = w * fr(i, j) * fr(i, j) * ap2 * r * r;
    }
  }
  CknResult out;
  out.lhs = pairwise_sum(lhs_terms);
  out.rhs = 0.25 * p * p * pairwise_sum(rhs_terms);
  if (out.lhs < kCknDegenerate) {
    out.degenerate = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.ratio = out.rhs / out.lhs;
  }
  return out;
}

}  // namespace axbq
