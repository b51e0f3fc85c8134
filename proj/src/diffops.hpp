#pragma once

#include <functional>
#include <string>

#include "axisolve.hpp"
#include "grid.hpp"

namespace axbq {

enum class OperatorTag { laplacian, modified_laplacian, d_r, d_z, stream_operator };

// Matrix-free linear operator on axisymmetric fields.
struct LinearOperatorRZ {
  OperatorTag tag;
  std::function<ScalarField(const ScalarField&)> apply;
};

LinearOperatorRZ make_operator(OperatorTag tag);

// d_rr + (1/r) d_r + d_zz on an even field.
ScalarField laplacian_axisym(const ScalarField& f);
// d_rr + (3/r) d_r + d_zz on an even field, i.e. Laplacian + (2/r) d_r.
ScalarField modified_laplacian(const ScalarField& f);
// (d_r f) / r on an even field; the result is even.
ScalarField dr_over_r(const ScalarField& f);
// d_rr + (1/r) d_r - 1/r^2 + d_zz on an odd field.
ScalarField stream_operator(const ScalarField& psi);

// omega_theta = d_z v^r - d_r v^z (odd).
ScalarField curl_axisym(const VelocityRZ& v);
// (1/r) d_r (r v^r) + d_z v^z with centered differences (even).
ScalarField divergence(const VelocityRZ& v);
// v^r / r (even).
ScalarField vr_over_r(const VelocityRZ& v);

// Solves -(d_rr + (1/r) d_r - 1/r^2 + d_zz) psi = omega_theta with psi = 0
// on the outer faces and odd parity at the axis.
class StreamSolver {
 public:
  explicit StreamSolver(const GridSpec& grid, SolverBackend backend = SolverBackend::fast_direct);
  ScalarField solve(const ScalarField& omega_theta, double tol = 1e-10) const;
  const GridSpec& grid() const { return solver_.stencil().grid; }

 private:
  AxisymSolver solver_;
};

// v^r = -d_z psi, v^z = (1/r) d_r (r psi).
VelocityRZ velocity_from_stream(const ScalarField& psi);

VelocityRZ biot_savart(const ScalarField& omega_theta);

// Velocity-gradient diagnostics for v = v^r e_r + v^z e_z in R^3:
// |grad v|^2 = (d_r v^r)^2 + (d_z v^r)^2 + (d_r v^z)^2 + (d_z v^z)^2 + (v^r/r)^2.
struct GradientNorms {
  double l2 = 0.0;    // ||grad v||_{L2}
  double linf = 0.0;  // max of the pointwise Frobenius norm
};
GradientNorms velocity_gradient_norms(const VelocityRZ& v);

// L2 norm of the gradient of a scalar field (sqrt(|d_r f|^2 + |d_z f|^2)).
double gradient_l2(const ScalarField& f);

// Test hook: when enabled, modified_laplacian() uses a perturbed radial
// coefficient. Used by the harness self-test to prove that the identity
// checks can fail.
void set_stencil_mutation(bool enabled);
bool stencil_mutation();

void require_parity(const ScalarField& f, Parity expected, const char* where);

}  // namespace axbq
