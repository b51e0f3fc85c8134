#include "lpbesov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "axisolve.hpp"
#include "errors.hpp"

namespace axbq {

namespace {

constexpr double kStepLow = 0.75;
constexpr double kStepHigh = 4.0 / 3.0;

double smooth_zero(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double lp_combine(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  if (r == 1.0) return pairwise_sum(terms);
  std::vector<double> pw(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) pw[k] = std::pow(terms[k], r);
  return std::pow(pairwise_sum(pw), 1.0 / r);
}

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0)) throw Error(ErrorCode::invalid_argument, std::string(what) + " must lie in [1, inf]");
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

double lp_step(double s) {
  if (s <= kStepLow) return 1.0;
  if (s >= kStepHigh) return 0.0;
  const double t = (s - kStepLow) / (kStepHigh - kStepLow);
  const double a = smooth_zero(1.0 - t);
  const double b = smooth_zero(t);
  return a / (a + b);
}

double DyadicPartition::chi(double xi) const { return lp_step(xi); }

double DyadicPartition::phi(double xi) const { return lp_step(0.5 * xi) - lp_step(xi); }

double DyadicPartition::block_multiplier(int q, double xi) const {
  if (q < 0) return chi(xi);
  return phi(std::ldexp(xi, -q));
}

double DyadicPartition::resolved_limit() const { return kStepLow * std::ldexp(1.0, qmax + 1); }

const SpectralPlan& DyadicPartition::plan(Parity p) const {
  const auto& ptr = p == Parity::even ? even_plan : odd_plan;
  if (!ptr) throw Error(ErrorCode::internal, "DyadicPartition: spectral plan missing");
  return *ptr;
}

int resolved_qmax(const GridSpec& grid) {
  return static_cast<int>(std::floor(std::log2(std::numbers::pi / grid.h()))) - 1;
}

DyadicPartition build_partition(const GridSpec& grid) {
  const int qmax = resolved_qmax(grid);
  if (qmax < 1) {
    throw Error(ErrorCode::grid_too_coarse,
                "build_partition: grid resolves no dyadic block beyond q = 0 (qmax = " + std::to_string(qmax) + ")");
  }
  DyadicPartition part;
  part.grid = grid;
  part.qmax = qmax;
  part.even_plan = std::make_shared<const SpectralPlan>(grid, Parity::even);
  part.odd_plan = std::make_shared<const SpectralPlan>(grid, Parity::odd);
  return part;
}

PartitionResiduals partition_residuals(const DyadicPartition& part, int samples) {
  PartitionResiduals out;
  out.square_min = std::numeric_limits<double>::infinity();
  out.square_max = 0.0;
  const double lim = part.resolved_limit();
  for (int s = 0; s <= samples; ++s) {
    const double xi = lim * s / samples;
    double sum = part.chi(xi);
    double sq = sum * sum;
    std::vector<int> active;
    if (part.chi(xi) > 0.0) active.push_back(-1);
    for (int q = 0; q <= part.qmax; ++q) {
      const double v = part.phi(std::ldexp(xi, -q));
      sum += v;
      sq += v * v;
      if (v > 0.0) active.push_back(q);
    }
    out.unity = std::max(out.unity, std::abs(sum - 1.0));
    out.square_min = std::min(out.square_min, sq);
    out.square_max = std::max(out.square_max, sq);
    // the phi blocks (q >= 0) must not overlap when two indices apart
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b)
        if (active[a] >= 0 && active[b] - active[a] >= 2) out.disjoint = false;
  }
  return out;
}

struct SpectralPlan::Impl {
  RowMat q;                   // orthonormal eigenvectors of W^1/2 R W^-1/2 (columns)
  std::vector<double> sqrt_r;
  AxialSineTransform axial;
  explicit Impl(const GridSpec& g) : axial(g) {}
};

SpectralPlan::SpectralPlan(const GridSpec& grid, Parity parity)
    : grid_(grid), parity_(parity), impl_(std::make_unique<Impl>(grid)) {
  const RadialStencil st = parity == Parity::even ? laplacian_stencil(grid) : stream_stencil(grid);
  const int nr = grid.nr;
  impl_->sqrt_r.resize(nr);
  for (int i = 0; i < nr; ++i) impl_->sqrt_r[i] = std::sqrt(grid.r(i));

  Eigen::VectorXd diag(nr), sub(nr - 1);
  for (int i = 0; i < nr; ++i) diag[i] = st.diag[i];
  for (int i = 0; i + 1 < nr; ++i) sub[i] = st.upper[i] * impl_->sqrt_r[i] / impl_->sqrt_r[i + 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::internal, "SpectralPlan: radial eigen-decomposition failed");

  // Eigen sorts ascending; the smoothest mode has the least negative value.
  impl_->q.resize(nr, nr);
  mu_.resize(nr);
  for (int m = 0; m < nr; ++m) {
    const int src = nr - 1 - m;
    mu_[m] = es.eigenvalues()[src];
    impl_->q.col(m) = es.eigenvectors().col(src);
  }

  const auto lam = axial_eigenvalues(grid);
  xi_.resize(grid.size());
  for (int m = 0; m < nr; ++m)
    for (int k = 0; k < grid.nz; ++k)
      xi_[static_cast<std::size_t>(m) * grid.nz + k] = std::sqrt(std::max(0.0, -mu_[m] - lam[k]));
}

SpectralPlan::~SpectralPlan() = default;

std::vector<double> SpectralPlan::forward(const ScalarField& f) const {
  if (!(f.grid() == grid_)) throw Error(ErrorCode::invalid_dimension, "SpectralPlan::forward: grid mismatch");
  if (f.parity() != parity_) throw Error(ErrorCode::parity_mismatch, "SpectralPlan::forward: parity mismatch");
  const int nr = grid_.nr, nz = grid_.nz;
  RowMat g(nr, nz);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nz; ++j) g(i, j) = impl_->sqrt_r[i] * f(i, j);
  RowMat c = impl_->q.transpose() * g;
  std::vector<double> out(c.data(), c.data() + c.size());
  impl_->axial.forward(out);
  return out;
}

ScalarField SpectralPlan::inverse(std::vector<double> coeffs) const {
  const int nr = grid_.nr, nz = grid_.nz;
  if (coeffs.size() != grid_.size()) throw Error(ErrorCode::invalid_dimension, "SpectralPlan::inverse: size mismatch");
  impl_->axial.inverse(coeffs);
  Eigen::Map<const RowMat> c(coeffs.data(), nr, nz);
  RowMat g = impl_->q * c;
  ScalarField f(grid_, parity_);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nz; ++j) f(i, j) = g(i, j) / impl_->sqrt_r[i];
  return f;
}

std::vector<double> SpectralPlan::radial_mode(int m) const {
  std::vector<double> v(grid_.nr);
  for (int i = 0; i < grid_.nr; ++i) v[i] = impl_->q(i, m) / impl_->sqrt_r[i];
  return v;
}

ScalarField DyadicDecomposition::sum() const {
  ScalarField s = tail;
  for (const ScalarField& b : blocks) s += b;
  return s;
}

namespace {

ScalarField apply_multiplier(const SpectralPlan& plan, const std::vector<double>& coeffs,
                             const std::function<double(double)>& m) {
  std::vector<double> c = coeffs;
  const auto& xi = plan.frequencies();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= m(xi[k]);
  return plan.inverse(std::move(c));
}

void require_partition_grid(const ScalarField& f, const DyadicPartition& part, const char* where) {
  if (!(f.grid() == part.grid)) throw Error(ErrorCode::invalid_dimension, std::string(where) + ": grid mismatch");
}

}  // namespace

DyadicDecomposition decompose(const ScalarField& f, const DyadicPartition& part) {
  require_partition_grid(f, part, "decompose");
  const SpectralPlan& plan = part.plan(f.parity());
  const std::vector<double> coeffs = plan.forward(f);
  DyadicDecomposition dec;
  for (int q = -1; q <= part.qmax; ++q)
    dec.blocks.push_back(apply_multiplier(plan, coeffs, [&](double xi) { return part.block_multiplier(q, xi); }));
  const int top = part.qmax + 1;
  dec.tail = apply_multiplier(plan, coeffs, [top](double xi) { return 1.0 - lp_step(std::ldexp(xi, -top)); });
  return dec;
}

ScalarField lp_block(const ScalarField& f, int q, const DyadicPartition& part) {
  require_partition_grid(f, part, "lp_block");
  if (q < -1 || q > part.qmax) throw Error(ErrorCode::invalid_argument, "lp_block: q outside the resolved range");
  const SpectralPlan& plan = part.plan(f.parity());
  return apply_multiplier(plan, plan.forward(f), [&](double xi) { return part.block_multiplier(q, xi); });
}

double besov_norm(const DyadicDecomposition& dec, double s, double p, double r) {
  require_exponent(p, "besov_norm: p");
  require_exponent(r, "besov_norm: r");
  std::vector<double> terms;
  for (int q = -1; q <= dec.qmax(); ++q) terms.push_back(std::pow(2.0, q * s) * lp_norm(dec.block(q), p));
  return lp_combine(terms, r);
}

double besov_norm(const ScalarField& f, double s, double p, double r, const DyadicPartition& part) {
  require_exponent(p, "besov_norm: p");
  require_exponent(r, "besov_norm: r");
  return besov_norm(decompose(f, part), s, p, r);
}

double besov_norm(const VelocityRZ& v, double s, double p, double r, const DyadicPartition& part) {
  require_exponent(p, "besov_norm: p");
  require_exponent(r, "besov_norm: r");
  const DyadicDecomposition dr = decompose(v.vr, part);
  const DyadicDecomposition dz = decompose(v.vz, part);
  std::vector<double> terms;
  for (int q = -1; q <= part.qmax; ++q) {
    const ScalarField& a = dr.block(q);
    const ScalarField& b = dz.block(q);
    ScalarField mag(a.grid(), Parity::even);
    for (std::size_t k = 0; k < mag.raw().size(); ++k) mag.raw()[k] = std::hypot(a.raw()[k], b.raw()[k]);
    terms.push_back(std::pow(2.0, q * s) * lp_norm(mag, p));
  }
  return lp_combine(terms, r);
}

BernsteinResult bernstein_check(const ScalarField& f, int q, double a, double b, const DyadicPartition& part) {
  require_exponent(a, "bernstein_check: a");
  if (!(b >= a)) throw Error(ErrorCode::invalid_argument, "bernstein_check: requires a <= b");
  if (q < 0 || q > part.qmax) throw Error(ErrorCode::invalid_argument, "bernstein_check: q outside [0, qmax]");
  const ScalarField blk = lp_block(f, q, part);
  BernsteinResult out;
  out.block_norm = lp_norm(blk, a);
  out.lb_norm = lp_norm(blk, b);
  const double scale = std::ldexp(1.0, q);
  if (out.block_norm < 1e-14) {
    out.empty = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const ScalarField gr = d_r(blk);
  const ScalarField gz = d_z(blk);
  ScalarField mag(blk.grid(), Parity::even);
  for (std::size_t k = 0; k < mag.raw().size(); ++k) mag.raw()[k] = std::hypot(gr.raw()[k], gz.raw()[k]);
  out.gradient_norm = lp_norm(mag, a);
  out.rhs_low = scale * out.block_norm / 8.0;
  out.rhs_high = 8.0 * scale * out.block_norm;
  out.ratio = out.gradient_norm / (scale * out.block_norm);
  const double inv_b = std::isinf(b) ? 0.0 : 1.0 / b;
  const double inv_a = std::isinf(a) ? 0.0 : 1.0 / a;
  out.lb_bound = std::pow(2.0, 3.0 * q * (inv_a - inv_b)) * out.block_norm;
  return out;
}

ScalarField mollify(const ScalarField& f, int n, const DyadicPartition& part) {
  require_partition_grid(f, part, "mollify");
  if (n < 0 || n > part.qmax + 1) throw Error(ErrorCode::invalid_argument, "mollify: n outside [0, qmax + 1]");
  const SpectralPlan& plan = part.plan(f.parity());
  // chi + sum_{j<n} phi(2^-j .) telescopes to theta(2^-n .)
  return apply_multiplier(plan, plan.forward(f), [n](double xi) { return lp_step(std::ldexp(xi, -n)); });
}

}  // namespace axbq
