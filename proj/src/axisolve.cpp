#include "axisolve.hpp"

#include <fftw3.h>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <mutex>
#include <numbers>

#include "errors.hpp"

namespace axbq {

namespace {

// The FFTW planner is not thread-safe; execution with the new-array API is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RadialStencil make_radial_stencil(const GridSpec& grid, const std::vector<double>& first_order,
                                  const std::vector<double>& zeroth_order, Parity axis_parity) {
  const int n = grid.nr;
  const double h = grid.dr();
  RadialStencil st;
  st.grid = grid;
  st.axis_parity = axis_parity;
  st.lower.assign(n, 0.0);
  st.diag.assign(n, 0.0);
  st.upper.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = first_order.empty() ? 0.0 : first_order[i];
    const double c = zeroth_order.empty() ? 0.0 : zeroth_order[i];
    st.lower[i] = 1.0 / (h * h) - a / (2.0 * h);
    st.upper[i] = 1.0 / (h * h) + a / (2.0 * h);
    st.diag[i] = -2.0 / (h * h) + c;
  }
  st.diag[0] += (axis_parity == Parity::even ? 1.0 : -1.0) * st.lower[0];
  st.lower[0] = 0.0;
  st.diag[n - 1] -= st.upper[n - 1];
  st.upper[n - 1] = 0.0;
  return st;
}

RadialStencil laplacian_stencil(const GridSpec& grid) {
  std::vector<double> a(grid.nr);
  for (int i = 0; i < grid.nr; ++i) a[i] = 1.0 / grid.r(i);
  return make_radial_stencil(grid, a, {}, Parity::even);
}

RadialStencil modified_stencil(const GridSpec& grid) {
  std::vector<double> a(grid.nr);
  for (int i = 0; i < grid.nr; ++i) a[i] = 3.0 / grid.r(i);
  return make_radial_stencil(grid, a, {}, Parity::even);
}

RadialStencil stream_stencil(const GridSpec& grid) {
  std::vector<double> a(grid.nr), c(grid.nr);
  for (int i = 0; i < grid.nr; ++i) {
    a[i] = 1.0 / grid.r(i);
    c[i] = -1.0 / (grid.r(i) * grid.r(i));
  }
  return make_radial_stencil(grid, a, c, Parity::odd);
}

RadialStencil regularized_stencil(const GridSpec& grid, double epsilon) {
  std::vector<double> a(grid.nr);
  for (int i = 0; i < grid.nr; ++i) {
    const double r = grid.r(i);
    a[i] = 1.0 / r + 2.0 * r / (r * r + epsilon);
  }
  return make_radial_stencil(grid, a, {}, Parity::even);
}

ScalarField apply_operator(const RadialStencil& st, double alpha, double beta, const ScalarField& f) {
  const GridSpec& g = st.grid;
  if (!(f.grid() == g)) throw Error(ErrorCode::invalid_dimension, "apply_operator: grid mismatch");
  ScalarField out(g, f.parity());
  const double cz = 1.0 / (g.dz() * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) {
      double rf = st.diag[i] * f(i, j);
      if (i > 0) rf += st.lower[i] * f(i - 1, j);
      if (i + 1 < g.nr) rf += st.upper[i] * f(i + 1, j);
      const double zz = cz * (f.ghost(i, j + 1) - 2.0 * f(i, j) + f.ghost(i, j - 1));
      out(i, j) = alpha * f(i, j) + beta * (rf + zz);
    }
  }
  return out;
}

std::vector<double> axial_eigenvalues(const GridSpec& grid) {
  std::vector<double> lam(grid.nz);
  const double c = 4.0 / (grid.dz() * grid.dz());
  for (int k = 0; k < grid.nz; ++k) {
    const double s = std::sin(std::numbers::pi * (k + 1) / (2.0 * grid.nz));
    lam[k] = -c * s * s;
  }
  return lam;
}

AxialSineTransform::AxialSineTransform(const GridSpec& grid) : grid_(grid) {
  std::vector<double> buf(grid.size());
  int n = grid.nz;
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_r2r_kind fwd = FFTW_RODFT10;
  fftw_r2r_kind inv = FFTW_RODFT01;
  forward_plan_ = fftw_plan_many_r2r(1, &n, grid.nr, buf.data(), nullptr, 1, n, buf.data(), nullptr, 1, n,
                                     &fwd, flags);
  inverse_plan_ = fftw_plan_many_r2r(1, &n, grid.nr, buf.data(), nullptr, 1, n, buf.data(), nullptr, 1, n,
                                     &inv, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw Error(ErrorCode::internal, "could not create sine-transform plans");
  }
}

AxialSineTransform::~AxialSineTransform() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void AxialSineTransform::forward(std::vector<double>& data) const {
  fftw_execute_r2r(static_cast<fftw_plan>(forward_plan_), data.data(), data.data());
}

void AxialSineTransform::inverse(std::vector<double>& data) const {
  fftw_execute_r2r(static_cast<fftw_plan>(inverse_plan_), data.data(), data.data());
  const double scale = 1.0 / (2.0 * grid_.nz);
  for (double& v : data) v *= scale;
}

struct AxisymSolver::Impl {
  // fast_direct: Thomas factors per axial mode, stored mode-major.
  std::unique_ptr<AxialSineTransform> sine;
  std::vector<double> cprime;   // modified upper coefficients
  std::vector<double> inv_den;  // reciprocal pivots
  std::vector<double> lower;

  // sparse routes
  Eigen::SparseMatrix<double> matrix;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
};

namespace {

Eigen::SparseMatrix<double> assemble(const RadialStencil& st, double alpha, double beta) {
  const GridSpec& g = st.grid;
  const int nr = g.nr;
  const int nz = g.nz;
  const double cz = 1.0 / (g.dz() * g.dz());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5) * g.size());
  auto id = [nz](int i, int j) { return i * nz + j; };
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nz; ++j) {
      double d = alpha + beta * (st.diag[i] - 2.0 * cz);
      if (j == 0) d -= beta * cz;
      if (j == nz - 1) d -= beta * cz;
      trips.emplace_back(id(i, j), id(i, j), d);
      if (i > 0) trips.emplace_back(id(i, j), id(i - 1, j), beta * st.lower[i]);
      if (i + 1 < nr) trips.emplace_back(id(i, j), id(i + 1, j), beta * st.upper[i]);
      if (j > 0) trips.emplace_back(id(i, j), id(i, j - 1), beta * cz);
      if (j + 1 < nz) trips.emplace_back(id(i, j), id(i, j + 1), beta * cz);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

}  // namespace

AxisymSolver::AxisymSolver(RadialStencil stencil, double alpha, double beta, SolverBackend backend)
    : stencil_(std::move(stencil)), alpha_(alpha), beta_(beta), backend_(backend), impl_(std::make_unique<Impl>()) {
  const GridSpec& g = stencil_.grid;
  if (backend_ == SolverBackend::fast_direct) {
    impl_->sine = std::make_unique<AxialSineTransform>(g);
    const auto lam = axial_eigenvalues(g);
    const int nr = g.nr;
    impl_->cprime.assign(g.size(), 0.0);
    impl_->inv_den.assign(g.size(), 0.0);
    impl_->lower.resize(nr);
    for (int i = 0; i < nr; ++i) impl_->lower[i] = beta_ * stencil_.lower[i];
    for (int k = 0; k < g.nz; ++k) {
      double* cp = impl_->cprime.data() + static_cast<std::size_t>(k) * nr;
      double* id = impl_->inv_den.data() + static_cast<std::size_t>(k) * nr;
      double prev_c = 0.0;
      for (int i = 0; i < nr; ++i) {
        const double d = alpha_ + beta_ * (stencil_.diag[i] + lam[k]);
        const double den = d - impl_->lower[i] * prev_c;
        if (den == 0.0 || !std::isfinite(den)) {
          throw SolverError("singular tridiagonal pivot in axisymmetric solver", 0.0);
        }
        id[i] = 1.0 / den;
        cp[i] = beta_ * stencil_.upper[i] * id[i];
        prev_c = cp[i];
      }
    }
  } else {
    impl_->matrix = assemble(stencil_, alpha_, beta_);
    if (backend_ == SolverBackend::sparse_lu) {
      impl_->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      impl_->lu->compute(impl_->matrix);
      if (impl_->lu->info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed", 0.0);
      }
    }
  }
}

AxisymSolver::~AxisymSolver() = default;
AxisymSolver::AxisymSolver(AxisymSolver&&) noexcept = default;
AxisymSolver& AxisymSolver::operator=(AxisymSolver&&) noexcept = default;

SolveResult AxisymSolver::solve(const ScalarField& rhs, double tol) const {
  const GridSpec& g = stencil_.grid;
  if (!(rhs.grid() == g)) throw Error(ErrorCode::invalid_dimension, "solve: right-hand side grid mismatch");
  SolveResult out;
  const Parity parity = stencil_.axis_parity;
  if (backend_ == SolverBackend::fast_direct) {
    std::vector<double> data(rhs.values().begin(), rhs.values().end());
    impl_->sine->forward(data);
    const int nr = g.nr;
    const int nz = g.nz;
    std::vector<double> col(nr);
    for (int k = 0; k < nz; ++k) {
      const double* cp = impl_->cprime.data() + static_cast<std::size_t>(k) * nr;
      const double* id = impl_->inv_den.data() + static_cast<std::size_t>(k) * nr;
      double prev = 0.0;
      for (int i = 0; i < nr; ++i) {
        const double b = data[static_cast<std::size_t>(i) * nz + k];
        prev = (b - impl_->lower[i] * prev) * id[i];
        col[i] = prev;
      }
      for (int i = nr - 2; i >= 0; --i) col[i] -= cp[i] * col[i + 1];
      for (int i = 0; i < nr; ++i) data[static_cast<std::size_t>(i) * nz + k] = col[i];
    }
    impl_->sine->inverse(data);
    out.x = ScalarField(g, parity, std::move(data));
  } else {
    Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), static_cast<Eigen::Index>(g.size()));
    Eigen::VectorXd x;
    if (backend_ == SolverBackend::sparse_lu) {
      x = impl_->lu->solve(b);
    } else {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
      it.setTolerance(tol * 1e-2);
      it.setMaxIterations(20 * static_cast<int>(g.nr + g.nz));
      it.compute(impl_->matrix);
      x = it.solve(b);
      out.iterations = static_cast<int>(it.iterations());
    }
    out.x = ScalarField(g, parity, std::vector<double>(x.data(), x.data() + x.size()));
  }
  ScalarField res = apply_operator(stencil_, alpha_, beta_, out.x);
  res -= ScalarField(g, parity, std::vector<double>(rhs.values().begin(), rhs.values().end()));
  out.residual_l2 = lp_norm(res, 2.0);
  const double scale = 1.0 + lp_norm(rhs, 2.0);
  if (!(out.residual_l2 <= tol * scale)) {
    throw SolverError("axisymmetric solve missed tolerance", out.residual_l2 / scale);
  }
  return out;
}

}  // namespace axbq
