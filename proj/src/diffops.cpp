#include "diffops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "errors.hpp"

namespace axbq {

namespace {

std::atomic<bool> g_mutation{false};

}  // namespace

void set_stencil_mutation(bool enabled) { g_mutation.store(enabled); }
bool stencil_mutation() { return g_mutation.load(); }

void require_parity(const ScalarField& f, Parity expected, const char* where) {
  if (f.parity() != expected) {
    throw Error(ErrorCode::parity_mismatch, std::string(where) + ": expected " +
                                                (expected == Parity::even ? "even" : "odd") +
                                                " axis parity");
  }
}

ScalarField laplacian_axisym(const ScalarField& f) {
  require_parity(f, Parity::even, "laplacian_axisym");
  return apply_operator(laplacian_stencil(f.grid()), 0.0, 1.0, f);
}

ScalarField modified_laplacian(const ScalarField& f) {
  require_parity(f, Parity::even, "modified_laplacian");
  if (stencil_mutation()) {
    std::vector<double> a(f.nr());
    for (int i = 0; i < f.nr(); ++i) a[i] = 2.9 / f.grid().r(i);
    return apply_operator(make_radial_stencil(f.grid(), a, {}, Parity::even), 0.0, 1.0, f);
  }
  return apply_operator(modified_stencil(f.grid()), 0.0, 1.0, f);
}

ScalarField dr_over_r(const ScalarField& f) {
  require_parity(f, Parity::even, "dr_over_r");
  return divide_by_r(d_r(f));
}

ScalarField stream_operator(const ScalarField& psi) {
  require_parity(psi, Parity::odd, "stream_operator");
  return apply_operator(stream_stencil(psi.grid()), 0.0, 1.0, psi);
}

LinearOperatorRZ make_operator(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::laplacian: return {tag, laplacian_axisym};
    case OperatorTag::modified_laplacian: return {tag, modified_laplacian};
    case OperatorTag::d_r: return {tag, [](const ScalarField& f) { return d_r(f); }};
    case OperatorTag::d_z: return {tag, [](const ScalarField& f) { return d_z(f); }};
    case OperatorTag::stream_operator: return {tag, stream_operator};
  }
  throw Error(ErrorCode::invalid_argument, "unknown operator tag");
}

ScalarField curl_axisym(const VelocityRZ& v) {
  require_parity(v.vr, Parity::odd, "curl_axisym(v^r)");
  require_parity(v.vz, Parity::even, "curl_axisym(v^z)");
  ScalarField w = d_z(v.vr);
  w -= d_r(v.vz);
  w.set_parity(Parity::odd);
  return w;
}

ScalarField divergence(const VelocityRZ& v) {
  const GridSpec& g = v.vr.grid();
  ScalarField out(g, Parity::even);
  const double cr = 1.0 / (2.0 * g.dr());
  const double cz = 1.0 / (2.0 * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    const double rp = g.r(i + 1);
    const double rm = g.r(i - 1);
    const double inv_r = 1.0 / g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const double radial = inv_r * cr * (rp * v.vr.ghost(i + 1, j) - rm * v.vr.ghost(i - 1, j));
      const double axial = cz * (v.vz.ghost(i, j + 1) - v.vz.ghost(i, j - 1));
      out(i, j) = radial + axial;
    }
  }
  return out;
}

ScalarField vr_over_r(const VelocityRZ& v) {
  require_parity(v.vr, Parity::odd, "vr_over_r");
  return divide_by_r(v.vr);
}

StreamSolver::StreamSolver(const GridSpec& grid, SolverBackend backend)
    : solver_(stream_stencil(grid), 0.0, -1.0, backend) {}

ScalarField StreamSolver::solve(const ScalarField& omega_theta, double tol) const {
  require_parity(omega_theta, Parity::odd, "biot_savart");
  return solver_.solve(omega_theta, tol).x;
}

VelocityRZ velocity_from_stream(const ScalarField& psi) {
  require_parity(psi, Parity::odd, "velocity_from_stream");
  const GridSpec& g = psi.grid();
  VelocityRZ v{ScalarField(g, Parity::odd), ScalarField(g, Parity::even)};
  const double cr = 1.0 / (2.0 * g.dr());
  const double cz = 1.0 / (2.0 * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    const double rp = g.r(i + 1);
    const double rm = g.r(i - 1);
    const double inv_r = 1.0 / g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      v.vr(i, j) = -cz * (psi.ghost(i, j + 1) - psi.ghost(i, j - 1));
      v.vz(i, j) = inv_r * cr * (rp * psi.ghost(i + 1, j) - rm * psi.ghost(i - 1, j));
    }
  }
  return v;
}

VelocityRZ biot_savart(const ScalarField& omega_theta) {
  StreamSolver solver(omega_theta.grid());
  return velocity_from_stream(solver.solve(omega_theta));
}

namespace {

// The outer faces carry a slip condition (only the normal component
// vanishes), so the Dirichlet ghosts would fake a boundary layer in the
// tangential derivatives. One-sided second-order differences there.
ScalarField d_r_wall(const ScalarField& f) {
  ScalarField out = d_r(f);
  const GridSpec& g = f.grid();
  const int n = g.nr;
  if (n < 3) return out;
  for (int j = 0; j < g.nz; ++j)
    out(n - 1, j) = (3 * f(n - 1, j) - 4 * f(n - 2, j) + f(n - 3, j)) / (2 * g.dr());
  return out;
}

ScalarField d_z_wall(const ScalarField& f) {
  ScalarField out = d_z(f);
  const GridSpec& g = f.grid();
  const int n = g.nz;
  if (n < 3) return out;
  for (int i = 0; i < g.nr; ++i) {
    out(i, 0) = (-3 * f(i, 0) + 4 * f(i, 1) - f(i, 2)) / (2 * g.dz());
    out(i, n - 1) = (3 * f(i, n - 1) - 4 * f(i, n - 2) + f(i, n - 3)) / (2 * g.dz());
  }
  return out;
}

}  // namespace

GradientNorms velocity_gradient_norms(const VelocityRZ& v) {
  const ScalarField a = d_r(v.vr);
  const ScalarField b = d_z_wall(v.vr);
  const ScalarField c = d_r_wall(v.vz);
  const ScalarField d = d_z(v.vz);
  const ScalarField e = divide_by_r(v.vr);
  GradientNorms out;
  out.l2 = std::sqrt(inner(a, a) + inner(b, b) + inner(c, c) + inner(d, d) + inner(e, e));
  auto av = a.values(), bv = b.values(), cv = c.values(), dv = d.values(), ev = e.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double s = av[k] * av[k] + bv[k] * bv[k] + cv[k] * cv[k] + dv[k] * dv[k] + ev[k] * ev[k];
    out.linf = std::max(out.linf, std::sqrt(s));
  }
  return out;
}

double gradient_l2(const ScalarField& f) {
  const ScalarField fr = d_r(f);
  const ScalarField fz = d_z(f);
  return std::sqrt(inner(fr, fr) + inner(fz, fz));
}

}  // namespace axbq
