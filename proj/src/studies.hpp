#pragma once

// Property studies that need no time evolution: operator identities,
// elliptic bounds, CKN ratios, partition checks and convergence ladders.
// Each study returns its raw measurements; thresholds live in VerifyCheck.

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"

namespace axbq {

// h = h0, h0/2, ... (levels entries).
std::vector<double> h_ladder(double h0, int levels);

struct IdentityStudy {
  std::vector<double> h;
  std::vector<double> residual_lemLD;  // manufactured Gaussian, analytic Laplacian
  std::vector<double> residual_leme1;  // f = r exp(-r^2 - z^2)
  double order_lemLD = 0.0;
  double order_leme1 = 0.0;
};

// Box half-widths: 6 for the commutator, 16 for the second identity (its
// boundary term decays with the box size).
IdentityStudy identity_study(const std::vector<double>& hs);

struct EllipticConvergence {
  std::vector<double> h;
  std::vector<double> error;     // relative L2 error of L on the manufactured pair
  std::vector<double> ratio_l2;  // |L rho|_{L2} / |rho|_{L2}
  double order = 0.0;
};

EllipticConvergence elliptic_convergence(const std::vector<double>& hs);

// Largest |L rho|_p / |rho|_p over `fields` seeded random fields.
struct LpBoundStudy {
  std::vector<double> p;
  std::vector<double> coarse;   // h on [0, R] x [-R, R]
  std::vector<double> fine;     // h / 2 on the same box
  std::vector<double> doubled;  // h on [0, 2R] x [-2R, 2R]
  // max over p of |a/b - 1|
  double resolution_variation = 0.0;
  double domain_variation = 0.0;
};

LpBoundStudy lp_bound_study(double h, double box, int fields, std::uint64_t seed, const std::vector<double>& ps);

struct EpsilonStudy {
  std::vector<double> p;
  std::vector<double> epsilons;
  std::vector<double> ratio0;        // per p, direct solve
  std::vector<double> ratio_max;     // per p, max over epsilon
  double max_deviation = 0.0;        // max over p of |ratio_max / ratio0 - 1|
  std::vector<double> distance;      // |f^eps - f^0|_{L2} on the manufactured pair
  bool distance_decreasing = false;  // strictly decreasing as epsilon decreases
};

EpsilonStudy epsilon_study(double h, double box, int fields, std::uint64_t seed, const std::vector<double>& ps,
                           const std::vector<double>& epsilons);

struct CknStudy {
  std::vector<double> p;
  std::vector<double> min_ratio;  // over the random fields
  double gaussian_ratio = 0.0;    // p = 2
  double h = 0.0;
};

CknStudy ckn_study(const GridSpec& grid, int fields, std::uint64_t seed, const std::vector<double>& ps);

struct PartitionStudy {
  double unity = 0.0;
  double square_min = 0.0;
  double square_max = 0.0;
  bool disjoint = false;
  double reconstruction = 0.0;  // max relative L2 error of sum_q Delta_q f
};

PartitionStudy partition_study(const GridSpec& grid, int fields, std::uint64_t seed);

struct BernsteinStudy {
  std::vector<int> q;
  // |grad Delta_q f| / (2^q |Delta_q f|) over the fields
  std::vector<double> ratio_min;
  std::vector<double> ratio_max;
};

// Single-block fields Delta_q f of band-limited random fields, q = 1 .. qmax - 1.
BernsteinStudy bernstein_study(const GridSpec& grid, int fields, std::uint64_t seed);

// One pass/fail line of the verification suite.
struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  GridSpec grid;                 // desk grid for CKN, partition and Bernstein
  double h0 = 1.0 / 16;          // coarsest h of the convergence ladders
  int levels = 3;
  int random_fields = 20;
  std::uint64_t seed = 1;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  IdentityStudy identities;
  EllipticConvergence elliptic;
  LpBoundStudy lp_bound;
  EpsilonStudy epsilon;
  CknStudy ckn;
  PartitionStudy partition;
  BernsteinStudy bernstein;

  bool all_passed() const;
};

// Runs every study with the acceptance thresholds. Throws grid_too_coarse
// when the desk grid cannot carry a dyadic partition.
VerifyResult run_verify(const VerifyOptions& opt);

}  // namespace axbq
