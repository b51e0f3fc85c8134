#pragma once

// The singular elliptic operator  L = (Delta + (2/r) d_r)^{-1} (d_r / r)
// and its z-variant  (Delta + (2/r) d_r)^{-1} (d_z / r).

#include <string>
#include <vector>

#include "axisolve.hpp"
#include "grid.hpp"

namespace axbq {

inline constexpr double kEllipticTol = 1e-10;

struct EllipticSolution {
  ScalarField f;
  double residual_l2 = 0.0;
  double epsilon = 0.0;  // 0 for the direct singular-form solve
  std::vector<std::string> warnings;
};

// Solves (d_rr + (3/r) d_r + d_zz) f = (d_r rho) / r for even rho.
EllipticSolution op_L(const ScalarField& rho, SolverBackend backend = SolverBackend::fast_direct);

// Solves (Delta + 2 r d_r / (r^2 + eps)) f = r d_r rho / (r^2 + eps).
EllipticSolution op_L_regularized(const ScalarField& rho, double epsilon,
                                  SolverBackend backend = SolverBackend::fast_direct);

// Solves (d_rr + (3/r) d_r + d_zz) f = (d_z sigma) / r. sigma should be odd
// in r; an even sigma that does not vanish near the axis gets a warning.
EllipticSolution op_Lz(const ScalarField& sigma, SolverBackend backend = SolverBackend::fast_direct);

struct CknResult {
  double lhs = 0.0;    // ||f||_p^p
  double rhs = 0.0;    // (p^2/4) int |d_r f|^2 |f|^{p-2} r^2 dx
  double ratio = 0.0;  // rhs / lhs, NaN when degenerate
  bool degenerate = false;
};

inline constexpr double kCknDegenerate = 1e-14;

CknResult ckn_check(const ScalarField& f, double p);

}  // namespace axbq
