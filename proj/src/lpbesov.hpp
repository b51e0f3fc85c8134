#pragma once

// Littlewood-Paley blocks, Besov norms and Bernstein checks for
// axisymmetric fields.
//
// Frequencies come from an exact discrete eigen-expansion: the radial
// operator (order zero for even fields, order one for odd fields) is
// diagonalized once per grid, and the axial direction uses the sine
// transform. A mode (m, k) has |xi| = sqrt(-mu_m - lambda_k), so every
// multiplier is applied exactly and blocks sum back to the input up to
// round-off.

#include <memory>
#include <vector>

#include "grid.hpp"

namespace axbq {

// Smooth step: 1 on [0, 3/4], 0 on [4/3, inf), C-infinity in between.
double lp_step(double s);

class SpectralPlan;

struct DyadicPartition {
  GridSpec grid;
  int qmax = 0;
  std::shared_ptr<const SpectralPlan> even_plan;
  std::shared_ptr<const SpectralPlan> odd_plan;

  double chi(double xi) const;
  double phi(double xi) const;
  // Multiplier of block q (q = -1 gives chi).
  double block_multiplier(int q, double xi) const;
  // Largest |xi| on which chi + sum_{q<=qmax} phi(2^-q .) is identically 1.
  double resolved_limit() const;
  const SpectralPlan& plan(Parity p) const;
};

// Throws Error(grid_too_coarse) if qmax < 1.
DyadicPartition build_partition(const GridSpec& grid);

// qmax = floor(log2(pi / max(dr, dz))) - 1
int resolved_qmax(const GridSpec& grid);

struct PartitionResiduals {
  double unity = 0.0;       // max |chi + sum phi - 1|
  double square_min = 0.0;  // min of chi^2 + sum phi^2
  double square_max = 0.0;
  bool disjoint = true;     // supports of blocks |p - q| >= 2 never overlap
};

// Evaluates the identities on `samples` equispaced |xi| in [0, resolved_limit()].
PartitionResiduals partition_residuals(const DyadicPartition& part, int samples = 4096);

class SpectralPlan {
 public:
  SpectralPlan(const GridSpec& grid, Parity parity);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const GridSpec& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  // Radial eigenvalues mu_m (negative, ascending in |mu|).
  const std::vector<double>& radial_eigenvalues() const { return mu_; }
  // |xi| of coefficient (m, k), row-major nr x nz.
  const std::vector<double>& frequencies() const { return xi_; }

  std::vector<double> forward(const ScalarField& f) const;
  ScalarField inverse(std::vector<double> coeffs) const;

  // Radial eigenvector m sampled at the cell centers, in physical scaling.
  std::vector<double> radial_mode(int m) const;

 private:
  struct Impl;
  GridSpec grid_;
  Parity parity_;
  std::vector<double> mu_;
  std::vector<double> xi_;
  std::unique_ptr<Impl> impl_;
};

// Blocks q = -1 .. qmax, plus the unresolved remainder (multiplier
// 1 - theta(2^-(qmax+1) xi)) in `tail`.
struct DyadicDecomposition {
  std::vector<ScalarField> blocks;
  ScalarField tail;

  const ScalarField& block(int q) const { return blocks.at(static_cast<std::size_t>(q + 1)); }
  int qmax() const { return static_cast<int>(blocks.size()) - 2; }
  ScalarField sum() const;
};

DyadicDecomposition decompose(const ScalarField& f, const DyadicPartition& part);

// Single block Delta_q f.
ScalarField lp_block(const ScalarField& f, int q, const DyadicPartition& part);

// l^r norm over resolved blocks of 2^{qs} |Delta_q f|_{L^p}. p, r in [1, inf].
double besov_norm(const ScalarField& f, double s, double p, double r, const DyadicPartition& part);
double besov_norm(const DyadicDecomposition& dec, double s, double p, double r);

// Besov norm of a velocity: the block norms use |(Delta_q v^r, Delta_q v^z)|.
double besov_norm(const VelocityRZ& v, double s, double p, double r, const DyadicPartition& part);

struct BernsteinResult {
  double block_norm = 0.0;     // |Delta_q f|_{L^a}
  double gradient_norm = 0.0;  // |grad Delta_q f|_{L^a}
  double rhs_low = 0.0;        // 2^q |Delta_q f|_{L^a} / 8
  double rhs_high = 0.0;       // 8 * 2^q |Delta_q f|_{L^a}
  double ratio = 0.0;          // gradient_norm / (2^q block_norm)
  double lb_norm = 0.0;        // |Delta_q f|_{L^b}
  double lb_bound = 0.0;       // 2^{3q(1/a - 1/b)} |Delta_q f|_{L^a}
  bool empty = false;          // |Delta_q f| < 1e-14
};

BernsteinResult bernstein_check(const ScalarField& f, int q, double a, double b, const DyadicPartition& part);

// S_n f = sum_{j=-1}^{n-1} Delta_j f, for 0 <= n <= qmax + 1.
ScalarField mollify(const ScalarField& f, int n, const DyadicPartition& part);

}  // namespace axbq
