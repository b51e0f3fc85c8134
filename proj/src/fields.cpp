#include "fields.hpp"

#include <random>

#include "lpbesov.hpp"

namespace axbq {

RandomSmoothField RandomSmoothField::draw(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> center(-1.0, 1.0);
  std::uniform_real_distribution<double> width(0.6, 1.0);
  std::uniform_int_distribution<int> power(0, 2);
  RandomSmoothField f;
  for (int k = 0; k < count; ++k) f.terms.push_back({amp(rng), center(rng), width(rng), power(rng)});
  return f;
}

double RandomSmoothField::operator()(double r, double z) const {
  double s = 0.0;
  const double r2 = r * r;
  for (const Term& t : terms) {
    const double dz = z - t.center;
    s += t.amplitude * std::pow(r2, t.power) * std::exp(-(r2 + dz * dz) / (t.width * t.width));
  }
  return s;
}

ScalarField RandomSmoothField::sample(const GridSpec& grid, Parity parity) const {
  return ScalarField::sample(grid, parity, [this](double r, double z) { return (*this)(r, z); });
}

ScalarField bandlimited_field(const SpectralPlan& plan, double xi_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> c(plan.grid().size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (plan.frequencies()[k] < xi_max) c[k] = n01(rng);
  return plan.inverse(std::move(c));
}

double convergence_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(h[k]);
    const double y = std::log(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace axbq
