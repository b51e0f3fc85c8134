#pragma once

// Linear solves for z-independent axisymmetric operators
//
//   A f = alpha f + beta (R f + d_zz f)
//
// where R is a three-point radial stencil  d_rr + a(r) d_r + c(r)  with a
// parity ghost at the axis and homogeneous Dirichlet data on the outer cell
// faces. Because the coefficients do not depend on z, a discrete sine
// transform in z reduces A to one tridiagonal system per axial mode.

#include <memory>
#include <vector>

#include "grid.hpp"

namespace axbq {

struct RadialStencil {
  GridSpec grid;
  Parity axis_parity = Parity::even;
  // Row i couples f[i-1], f[i], f[i+1]; axis and outer ghosts are already
  // folded into diag[0] and diag[nr-1].
  std::vector<double> lower, diag, upper;
};

// d_rr + first_order[i] * d_r + zeroth_order[i], centered differences.
RadialStencil make_radial_stencil(const GridSpec& grid, const std::vector<double>& first_order,
                                  const std::vector<double>& zeroth_order, Parity axis_parity);

// d_rr + (1/r) d_r                       (axisymmetric Laplacian, even)
RadialStencil laplacian_stencil(const GridSpec& grid);
// d_rr + (3/r) d_r                       (Laplacian plus (2/r) d_r, even)
RadialStencil modified_stencil(const GridSpec& grid);
// d_rr + (1/r) d_r - 1/r^2               (stream-function operator, odd)
RadialStencil stream_stencil(const GridSpec& grid);
// d_rr + (1/r + 2 r / (r^2 + eps)) d_r   (regularized operator, even)
RadialStencil regularized_stencil(const GridSpec& grid, double epsilon);

// alpha f + beta (R f + d_zz f), evaluated with the stencil's ghosts.
ScalarField apply_operator(const RadialStencil& st, double alpha, double beta, const ScalarField& f);

enum class SolverBackend { fast_direct, sparse_lu, bicgstab };

struct SolveResult {
  ScalarField x;
  double residual_l2 = 0.0;  // weighted L2 norm of A x - b
  int iterations = 0;        // 0 for direct solves
};

// Factorizes alpha I + beta (R + d_zz) once; solve() may be called
// concurrently from several threads.
class AxisymSolver {
 public:
  AxisymSolver(RadialStencil stencil, double alpha, double beta,
               SolverBackend backend = SolverBackend::fast_direct);
  ~AxisymSolver();
  AxisymSolver(AxisymSolver&&) noexcept;
  AxisymSolver& operator=(AxisymSolver&&) noexcept;

  // Throws SolverError when the relative residual exceeds tol, measured as
  // |A x - b| <= tol * (1 + |b|).
  SolveResult solve(const ScalarField& rhs, double tol = 1e-10) const;

  const RadialStencil& stencil() const { return stencil_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  SolverBackend backend() const { return backend_; }

 private:
  struct Impl;
  RadialStencil stencil_;
  double alpha_;
  double beta_;
  SolverBackend backend_;
  std::unique_ptr<Impl> impl_;
};

// Eigenvalues of the discrete d_zz with Dirichlet faces, mode k = 1..nz:
// -(4 / dz^2) sin^2(pi k / (2 nz)).
std::vector<double> axial_eigenvalues(const GridSpec& grid);

// Orthogonal sine transform along z, applied row by row (each row is one
// radial index). forward() and inverse() are exact inverses.
class AxialSineTransform {
 public:
  explicit AxialSineTransform(const GridSpec& grid);
  ~AxialSineTransform();
  AxialSineTransform(const AxialSineTransform&) = delete;
  AxialSineTransform& operator=(const AxialSineTransform&) = delete;

  // In-place on an nr x nz row-major buffer.
  void forward(std::vector<double>& data) const;
  void inverse(std::vector<double>& data) const;

 private:
  GridSpec grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace axbq
