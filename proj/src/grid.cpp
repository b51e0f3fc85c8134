#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace axbq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_dimension: return "invalid dimension";
    case ErrorCode::parity_mismatch: return "parity mismatch";
    case ErrorCode::solver_nonconvergence: return "solver did not converge";
    case ErrorCode::grid_too_coarse: return "grid too coarse";
    case ErrorCode::near_one_branch: return "kappa is in the near-one branch";
    case ErrorCode::wrong_branch: return "wrong kappa branch";
    case ErrorCode::blow_up: return "blow-up";
    case ErrorCode::missing_series: return "missing series";
    case ErrorCode::config_mismatch: return "configuration mismatch";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::validation_error: return "validation error";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::missing_run: return "missing run";
    case ErrorCode::check_failed: return "check failed";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

double GridSpec::h() const { return std::max(dr(), dz()); }

GridSpec make_grid(int nr, int nz, double rmax, double zmin, double zmax) {
  if (nr < 4 || nz < 4 || !(rmax > 0.0) || !(zmin < zmax) || !std::isfinite(rmax) ||
      !std::isfinite(zmin) || !std::isfinite(zmax)) {
    std::ostringstream msg;
    msg << "invalid grid: nr=" << nr << " nz=" << nz << " rmax=" << rmax << " z=[" << zmin << ", "
        << zmax << "] (need nr, nz >= 4, rmax > 0, zmin < zmax)";
    throw Error(ErrorCode::invalid_dimension, msg.str());
  }
  return GridSpec{nr, nz, rmax, zmin, zmax};
}

GridSpec make_uniform_grid(double h, double rmax, double zhalf) {
  const int nr = static_cast<int>(std::lround(rmax / h));
  const int nz = static_cast<int>(std::lround(2.0 * zhalf / h));
  return make_grid(nr, nz, rmax, -zhalf, zhalf);
}

ScalarField::ScalarField(const GridSpec& grid, Parity parity)
    : grid_(grid), parity_(parity), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, Parity parity, std::vector<double> values)
    : grid_(grid), parity_(parity), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::invalid_dimension, "field value count does not match grid");
  }
}

ScalarField ScalarField::sample(const GridSpec& grid, Parity parity,
                                const std::function<double(double, double)>& fn) {
  ScalarField f(grid, parity);
  for (int i = 0; i < grid.nr; ++i) {
    for (int j = 0; j < grid.nz; ++j) f(i, j) = fn(grid.r(i), grid.z(j));
  }
  return f;
}

double ScalarField::ghost(int i, int j) const {
  double sign = 1.0;
  if (i < 0) {
    i = -1 - i;
    if (parity_ == Parity::odd) sign = -sign;
  } else if (i >= grid_.nr) {
    i = 2 * grid_.nr - 1 - i;
    sign = -sign;
  }
  if (j < 0) {
    j = -1 - j;
    sign = -sign;
  } else if (j >= grid_.nz) {
    j = 2 * grid_.nz - 1 - j;
    sign = -sign;
  }
  return sign * values_[index(i, j)];
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorCode::invalid_dimension, std::string(where) + ": fields live on different grids");
  }
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y) {
  require_same_grid(x, y, "axpby");
  ScalarField out(x.grid(), x.parity());
  auto o = out.values();
  auto xs = x.values();
  auto ys = y.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = a * xs[k] + b * ys[k];
  return out;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {

// Sum of g(value, i) * 2 pi r_i dr dz over the grid.
template <class Fn>
double weighted_sum(const GridSpec& grid, Fn&& g) {
  std::vector<double> terms(grid.size());
  const double cell = 2.0 * std::numbers::pi * grid.dr() * grid.dz();
  std::size_t k = 0;
  for (int i = 0; i < grid.nr; ++i) {
    const double w = cell * grid.r(i);
    for (int j = 0; j < grid.nz; ++j, ++k) terms[k] = w * g(i, j, k);
  }
  return pairwise_sum(terms);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::invalid_argument, "lp_norm: p must lie in [1, inf]");
  auto v = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  const double s = weighted_sum(f.grid(), [&](int, int, std::size_t k) {
    const double a = std::abs(v[k]);
    if (p == 2.0) return a * a;
    return a == 0.0 ? 0.0 : std::pow(a, p);
  });
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "inner");
  auto a = f.values();
  auto b = g.values();
  return weighted_sum(f.grid(), [&](int, int, std::size_t k) { return a[k] * b[k]; });
}

double l2_norm(const VelocityRZ& v) {
  auto a = v.vr.values();
  auto b = v.vz.values();
  return std::sqrt(
      weighted_sum(v.vr.grid(), [&](int, int, std::size_t k) { return a[k] * a[k] + b[k] * b[k]; }));
}

ScalarField d_r(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, flip(f.parity()));
  const double c = 1.0 / (2.0 * g.dr());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) out(i, j) = c * (f.ghost(i + 1, j) - f.ghost(i - 1, j));
  }
  return out;
}

ScalarField d_z(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, f.parity());
  const double c = 1.0 / (2.0 * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) out(i, j) = c * (f.ghost(i, j + 1) - f.ghost(i, j - 1));
  }
  return out;
}

ScalarField d_rr(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, f.parity());
  const double c = 1.0 / (g.dr() * g.dr());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) {
      out(i, j) = c * (f.ghost(i + 1, j) - 2.0 * f(i, j) + f.ghost(i - 1, j));
    }
  }
  return out;
}

ScalarField d_zz(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, f.parity());
  const double c = 1.0 / (g.dz() * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) {
      out(i, j) = c * (f.ghost(i, j + 1) - 2.0 * f(i, j) + f.ghost(i, j - 1));
    }
  }
  return out;
}

ScalarField d_rz(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, flip(f.parity()));
  const double c = 1.0 / (4.0 * g.dr() * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) {
      out(i, j) = c * (f.ghost(i + 1, j + 1) - f.ghost(i + 1, j - 1) - f.ghost(i - 1, j + 1) +
                       f.ghost(i - 1, j - 1));
    }
  }
  return out;
}

ScalarField divide_by_r(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, flip(f.parity()));
  for (int i = 0; i < g.nr; ++i) {
    const double inv = 1.0 / g.r(i);
    for (int j = 0; j < g.nz; ++j) out(i, j) = f(i, j) * inv;
  }
  return out;
}

ScalarField multiply_by_r(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g, flip(f.parity()));
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) out(i, j) = f(i, j) * r;
  }
  return out;
}

HNorms h_norms(const ScalarField& f) {
  HNorms out;
  out.l2 = lp_norm(f, 2.0);
  const ScalarField fr = d_r(f);
  const ScalarField fz = d_z(f);
  const double h1 = inner(fr, fr) + inner(fz, fz);
  out.h1_seminorm = std::sqrt(h1);

  // Hessian of an axisymmetric function in Cartesian coordinates has
  // Frobenius norm f_rr^2 + 2 f_rz^2 + f_zz^2 + (f_r / r)^2.
  const ScalarField frr = d_rr(f);
  const ScalarField fzz = d_zz(f);
  const ScalarField frz = d_rz(f);
  const ScalarField hoop = divide_by_r(fr);
  const double h2 = inner(frr, frr) + 2.0 * inner(frz, frz) + inner(fzz, fzz) + inner(hoop, hoop);
  out.h2_seminorm = std::sqrt(h2);
  return out;
}

}  // namespace axbq
