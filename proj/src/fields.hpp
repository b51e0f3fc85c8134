#pragma once

// Seeded smooth test fields shared by the verification suite and tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace axbq {

class SpectralPlan;

inline double gauss(double r, double z) { return std::exp(-r * r - z * z); }

// Sum of a few smooth axisymmetric bumps  a_k (r^2)^m_k exp(-(r^2 + (z - c_k)^2) / s_k^2).
// Parameters are drawn from a seeded generator so the same field can be
// sampled on several grids.
struct RandomSmoothField {
  struct Term {
    double amplitude, center, width;
    int power;
  };
  std::vector<Term> terms;

  static RandomSmoothField draw(std::uint64_t seed, int count = 4);
  double operator()(double r, double z) const;
  ScalarField sample(const GridSpec& grid, Parity parity = Parity::even) const;
};

// Random combination of the plan's eigenmodes with |xi| < xi_max.
ScalarField bandlimited_field(const SpectralPlan& plan, double xi_max, std::uint64_t seed);

// Least-squares slope of log(err) against log(h).
double convergence_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace axbq
