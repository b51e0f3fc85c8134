#pragma once

// Diagonalizing unknowns for the coupled (zeta, rho) system and residuals of
// the two operator identities satisfied by L.

#include <string>
#include <vector>

#include "grid.hpp"

namespace axbq {

inline constexpr double kKappaSwitch = 0.5;

enum class Branch { general, near_one };

// near_one iff |kappa - 1| < kKappaSwitch.
Branch branch_for(double kappa);
const char* to_string(Branch b);

struct CoupledUnknowns {
  ScalarField gamma;
  double kappa = 0.0;
  Branch branch = Branch::general;
};

// (1 - kappa) zeta - L rho
ScalarField gamma_general(const ScalarField& zeta, const ScalarField& rho, double kappa);
// zeta - rho / 2
ScalarField gamma_near_one(const ScalarField& zeta, const ScalarField& rho);
// Picks the branch from kappa.
CoupledUnknowns make_coupled(const ScalarField& zeta, const ScalarField& rho, double kappa);

// (gamma + L rho) / (1 - kappa). Throws Error(near_one_branch) when
// |kappa - 1| < kKappaSwitch.
ScalarField recover_zeta(const ScalarField& gamma, const ScalarField& rho, double kappa);

// Relative L2 norm of  L(Delta rho) - (Delta + (2/r) d_r) L rho.
// The discrete operators commute exactly, so with Delta rho taken from
// laplacian_axisym this is round-off; passing a sampled analytic Laplacian
// measures the discretization error of the identity instead.
double commutator_residual_lemma_LD(const ScalarField& rho);
double commutator_residual_lemma_LD(const ScalarField& rho, const ScalarField& laplacian_of_rho);

// Relative L2 norm of  L d_r f - [ f/r - L(f/r) - d_z (Delta + (2/r) d_r)^{-1} (d_z f / r) ].
// f should be odd in r. An even f is accepted; when it does not vanish at
// the axis a warning is appended to `warnings`.
double identity_residual_leme1(const ScalarField& f, std::vector<std::string>* warnings = nullptr);

// 50 h^2 |rho|_{H^2}, with the full discrete H^2 norm.
double lemma_tol(const ScalarField& rho);

}  // namespace axbq
