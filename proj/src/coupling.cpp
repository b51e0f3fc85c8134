#include "coupling.hpp"

#include <cmath>

#include "diffops.hpp"
#include "errors.hpp"
#include "singell.hpp"

namespace axbq {

namespace {

double relative(const ScalarField& diff, const ScalarField& ref) {
  const double d = lp_norm(diff, 2.0);
  const double n = lp_norm(ref, 2.0);
  if (n == 0.0) return d;
  return d / n;
}

}  // namespace

Branch branch_for(double kappa) {
  if (!(kappa >= 0.0)) throw Error(ErrorCode::invalid_argument, "kappa must be >= 0");
  return std::abs(kappa - 1.0) < kKappaSwitch ? Branch::near_one : Branch::general;
}

const char* to_string(Branch b) { return b == Branch::near_one ? "near_one" : "general"; }

ScalarField gamma_general(const ScalarField& zeta, const ScalarField& rho, double kappa) {
  require_same_grid(zeta, rho, "gamma_general");
  ScalarField out = (1.0 - kappa) * zeta;
  out -= op_L(rho).f;
  return out;
}

ScalarField gamma_near_one(const ScalarField& zeta, const ScalarField& rho) {
  require_same_grid(zeta, rho, "gamma_near_one");
  return axpby(1.0, zeta, -0.5, rho);
}

CoupledUnknowns make_coupled(const ScalarField& zeta, const ScalarField& rho, double kappa) {
  CoupledUnknowns c;
  c.kappa = kappa;
  c.branch = branch_for(kappa);
  c.gamma = c.branch == Branch::near_one ? gamma_near_one(zeta, rho) : gamma_general(zeta, rho, kappa);
  return c;
}

ScalarField recover_zeta(const ScalarField& gamma, const ScalarField& rho, double kappa) {
  require_same_grid(gamma, rho, "recover_zeta");
  if (branch_for(kappa) == Branch::near_one) {
    throw Error(ErrorCode::near_one_branch,
                "recover_zeta: |kappa - 1| < " + std::to_string(kKappaSwitch) + "; use zeta = gamma_1 + rho/2");
  }
  ScalarField out = gamma + op_L(rho).f;
  out *= 1.0 / (1.0 - kappa);
  return out;
}

double commutator_residual_lemma_LD(const ScalarField& rho) {
  require_parity(rho, Parity::even, "commutator_residual_lemma_LD");
  return commutator_residual_lemma_LD(rho, laplacian_axisym(rho));
}

double commutator_residual_lemma_LD(const ScalarField& rho, const ScalarField& laplacian_of_rho) {
  require_parity(rho, Parity::even, "commutator_residual_lemma_LD");
  require_same_grid(rho, laplacian_of_rho, "commutator_residual_lemma_LD");
  const ScalarField lhs = op_L(laplacian_of_rho).f;
  const ScalarField rhs = modified_laplacian(op_L(rho).f);
  return relative(lhs - rhs, lhs);
}

double identity_residual_leme1(const ScalarField& f, std::vector<std::string>* warnings) {
  ScalarField f_over_r = divide_by_r(f);
  if (f.parity() == Parity::even) {
    double axis = 0.0, all = 0.0;
    for (int j = 0; j < f.nz(); ++j) axis = std::max(axis, std::abs(f(0, j)));
    for (double v : f.values()) all = std::max(all, std::abs(v));
    if (warnings && axis > 1e-8 * std::max(1.0, all))
      warnings->emplace_back("identity_residual_leme1: f is even and does not vanish at the axis; f/r is singular");
    f_over_r.set_parity(Parity::even);
  }
  ScalarField fr = d_r(f);
  fr.set_parity(Parity::even);

  const ScalarField lhs = op_L(fr).f;
  ScalarField sigma = f;
  sigma.set_parity(Parity::odd);
  const EllipticSolution lz = op_Lz(sigma);
  ScalarField rhs = f_over_r - op_L(f_over_r).f;
  rhs -= d_z(lz.f);
  return relative(lhs - rhs, lhs);
}

double lemma_tol(const ScalarField& rho) {
  const HNorms n = h_norms(rho);
  const double h2 = std::sqrt(n.l2 * n.l2 + n.h1_seminorm * n.h1_seminorm + n.h2_seminorm * n.h2_seminorm);
  const double h = rho.grid().h();
  return 50.0 * h * h * h2;
}

}  // namespace axbq
