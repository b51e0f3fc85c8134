#pragma once

// Cell-centered meridian-plane grid for axisymmetric fields, field storage
// with parity ghost cells, and norms carrying the cylindrical volume weight
// 2*pi*r.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace axbq {

enum class Parity { even, odd };

inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

struct GridSpec {
  int nr = 0;
  int nz = 0;
  double rmax = 1.0;
  double zmin = -1.0;
  double zmax = 1.0;

  double dr() const { return rmax / nr; }
  double dz() const { return (zmax - zmin) / nz; }
  double h() const;  // max(dr, dz)
  double r(int i) const { return (i + 0.5) * dr(); }
  double z(int j) const { return zmin + (j + 0.5) * dz(); }
  std::size_t size() const { return static_cast<std::size_t>(nr) * static_cast<std::size_t>(nz); }

  bool operator==(const GridSpec&) const = default;
};

// Throws Error(invalid_dimension) when nr, nz < 4, rmax <= 0 or zmin >= zmax.
GridSpec make_grid(int nr, int nz, double rmax, double zmin, double zmax);

// Grid with spacing h in both directions over [0, rmax] x [-zhalf, zhalf].
GridSpec make_uniform_grid(double h, double rmax, double zhalf);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const GridSpec& grid, Parity parity);
  ScalarField(const GridSpec& grid, Parity parity, std::vector<double> values);

  // Samples fn(r, z) at cell centers.
  static ScalarField sample(const GridSpec& grid, Parity parity,
                            const std::function<double(double, double)>& fn);

  const GridSpec& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  int nr() const { return grid_.nr; }
  int nz() const { return grid_.nz; }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }

  // Value at (i, j) for i in [-1, nr] and j in [-1, nz]. Axis ghosts mirror
  // by parity, outer ghosts are odd mirrors (homogeneous Dirichlet on the
  // cell face).
  double ghost(int i, int j) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double c);

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.nz) + static_cast<std::size_t>(j);
  }

  GridSpec grid_{};
  Parity parity_ = Parity::even;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);

// a*x + b*y, parity of x.
ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y);

struct VelocityRZ {
  ScalarField vr;  // odd
  ScalarField vz;  // even
};

// Deterministic pairwise (tree) summation; the order depends only on the
// length of the input.
double pairwise_sum(std::span<const double> xs);

// Midpoint-rule (integral of |f|^p 2 pi r dr dz)^(1/p); p = infinity gives
// the grid max of |f|.
double lp_norm(const ScalarField& f, double p);

// Weighted inner product integral of f g 2 pi r dr dz.
double inner(const ScalarField& f, const ScalarField& g);

// L2 norm of a velocity (sqrt(|vr|^2 + |vz|^2) integrated).
double l2_norm(const VelocityRZ& v);

struct HNorms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;
  double h2_seminorm = 0.0;
};

HNorms h_norms(const ScalarField& f);

// Centered differences using parity ghosts. d_r flips parity, d_z keeps it.
ScalarField d_r(const ScalarField& f);
ScalarField d_z(const ScalarField& f);
ScalarField d_rr(const ScalarField& f);
ScalarField d_zz(const ScalarField& f);
ScalarField d_rz(const ScalarField& f);

// Pointwise f / r at cell centers; parity flips.
ScalarField divide_by_r(const ScalarField& f);
// Pointwise r f at cell centers; parity flips.
ScalarField multiply_by_r(const ScalarField& f);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

}  // namespace axbq
