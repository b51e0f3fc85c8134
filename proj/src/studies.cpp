#include "studies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coupling.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "lpbesov.hpp"
#include "singell.hpp"

namespace axbq {

namespace {

// rho = (3 - 2r^2 - 2z^2) g has  L rho = g.
double manufactured_rho(double r, double z) { return (3 - 2 * r * r - 2 * z * z) * gauss(r, z); }

double gauss_laplacian(double r, double z) { return (4 * r * r + 4 * z * z - 6) * gauss(r, z); }

double rel_l2(const ScalarField& a, const ScalarField& b) { return lp_norm(a - b, 2.0) / lp_norm(b, 2.0); }

double max_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) v = std::max(v, std::abs(a[k] / b[k] - 1.0));
  return v;
}

std::vector<double> max_ratios(const GridSpec& g, int fields, std::uint64_t seed, const std::vector<double>& ps) {
  std::vector<double> best(ps.size(), 0.0);
  for (int k = 0; k < fields; ++k) {
    const ScalarField rho = RandomSmoothField::draw(seed + static_cast<std::uint64_t>(k)).sample(g);
    const ScalarField f = op_L(rho).f;
    for (std::size_t i = 0; i < ps.size(); ++i) best[i] = std::max(best[i], lp_norm(f, ps[i]) / lp_norm(rho, ps[i]));
  }
  return best;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

}  // namespace

std::vector<double> h_ladder(double h0, int levels) {
  if (!(h0 > 0.0) || levels < 2) throw Error(ErrorCode::invalid_argument, "h_ladder: need h0 > 0 and levels >= 2");
  std::vector<double> hs;
  for (int k = 0; k < levels; ++k) hs.push_back(std::ldexp(h0, -k));
  return hs;
}

IdentityStudy identity_study(const std::vector<double>& hs) {
  IdentityStudy s;
  s.h = hs;
  for (double h : hs) {
    const GridSpec g = make_uniform_grid(h, 6.0, 6.0);
    s.residual_lemLD.push_back(commutator_residual_lemma_LD(ScalarField::sample(g, Parity::even, gauss),
                                                            ScalarField::sample(g, Parity::even, gauss_laplacian)));
    const GridSpec big = make_uniform_grid(h, 16.0, 16.0);
    s.residual_leme1.push_back(identity_residual_leme1(
        ScalarField::sample(big, Parity::odd, [](double r, double z) { return r * gauss(r, z); })));
  }
  s.order_lemLD = convergence_order(s.h, s.residual_lemLD);
  s.order_leme1 = convergence_order(s.h, s.residual_leme1);
  return s;
}

EllipticConvergence elliptic_convergence(const std::vector<double>& hs) {
  EllipticConvergence c;
  c.h = hs;
  for (double h : hs) {
    const GridSpec g = make_uniform_grid(h, 5.0, 5.0);
    const ScalarField rho = ScalarField::sample(g, Parity::even, manufactured_rho);
    const ScalarField f = op_L(rho).f;
    c.error.push_back(rel_l2(f, ScalarField::sample(g, Parity::even, gauss)));
    c.ratio_l2.push_back(lp_norm(f, 2.0) / lp_norm(rho, 2.0));
  }
  c.order = convergence_order(c.h, c.error);
  return c;
}

LpBoundStudy lp_bound_study(double h, double box, int fields, std::uint64_t seed, const std::vector<double>& ps) {
  LpBoundStudy s;
  s.p = ps;
  s.coarse = max_ratios(make_uniform_grid(h, box, box), fields, seed, ps);
  s.fine = max_ratios(make_uniform_grid(h / 2, box, box), fields, seed, ps);
  s.doubled = max_ratios(make_uniform_grid(h, 2 * box, 2 * box), fields, seed, ps);
  s.resolution_variation = max_variation(s.fine, s.coarse);
  s.domain_variation = max_variation(s.doubled, s.coarse);
  return s;
}

EpsilonStudy epsilon_study(double h, double box, int fields, std::uint64_t seed, const std::vector<double>& ps,
                           const std::vector<double>& epsilons) {
  EpsilonStudy s;
  s.p = ps;
  s.epsilons = epsilons;
  const GridSpec g = make_uniform_grid(h, box, box);
  s.ratio0.assign(ps.size(), 0.0);
  s.ratio_max.assign(ps.size(), 0.0);
  for (int k = 0; k < fields; ++k) {
    const ScalarField rho = RandomSmoothField::draw(seed + static_cast<std::uint64_t>(k)).sample(g);
    const ScalarField f0 = op_L(rho).f;
    for (std::size_t i = 0; i < ps.size(); ++i) s.ratio0[i] = std::max(s.ratio0[i], lp_norm(f0, ps[i]) / lp_norm(rho, ps[i]));
    for (double eps : epsilons) {
      const ScalarField fe = op_L_regularized(rho, eps).f;
      for (std::size_t i = 0; i < ps.size(); ++i)
        s.ratio_max[i] = std::max(s.ratio_max[i], lp_norm(fe, ps[i]) / lp_norm(rho, ps[i]));
    }
  }
  s.max_deviation = max_variation(s.ratio_max, s.ratio0);

  const ScalarField rho = ScalarField::sample(g, Parity::even, manufactured_rho);
  const ScalarField f0 = op_L(rho).f;
  for (double eps : epsilons) s.distance.push_back(lp_norm(op_L_regularized(rho, eps).f - f0, 2.0));
  // epsilons are listed from large to small
  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });
  s.distance_decreasing = true;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (!(s.distance[order[k]] < s.distance[order[k - 1]])) s.distance_decreasing = false;
  return s;
}

CknStudy ckn_study(const GridSpec& grid, int fields, std::uint64_t seed, const std::vector<double>& ps) {
  CknStudy s;
  s.p = ps;
  s.h = grid.h();
  s.min_ratio.assign(ps.size(), INFINITY);
  for (int k = 0; k < fields; ++k) {
    const ScalarField f = RandomSmoothField::draw(seed + static_cast<std::uint64_t>(k)).sample(grid);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const CknResult c = ckn_check(f, ps[i]);
      if (!c.degenerate) s.min_ratio[i] = std::min(s.min_ratio[i], c.ratio);
    }
  }
  s.gaussian_ratio = ckn_check(ScalarField::sample(grid, Parity::even, gauss), 2.0).ratio;
  return s;
}

PartitionStudy partition_study(const GridSpec& grid, int fields, std::uint64_t seed) {
  const DyadicPartition part = build_partition(grid);
  const PartitionResiduals r = partition_residuals(part);
  PartitionStudy s{r.unity, r.square_min, r.square_max, r.disjoint, 0.0};
  for (int k = 0; k < fields; ++k) {
    const ScalarField f =
        bandlimited_field(part.plan(Parity::even), part.resolved_limit(), seed + static_cast<std::uint64_t>(k));
    const DyadicDecomposition d = decompose(f, part);
    ScalarField sum(grid, Parity::even);
    for (const ScalarField& b : d.blocks) sum += b;
    s.reconstruction = std::max(s.reconstruction, rel_l2(sum, f));
  }
  return s;
}

BernsteinStudy bernstein_study(const GridSpec& grid, int fields, std::uint64_t seed) {
  const DyadicPartition part = build_partition(grid);
  BernsteinStudy s;
  for (int q = 1; q <= part.qmax - 1; ++q) {
    s.q.push_back(q);
    s.ratio_min.push_back(INFINITY);
    s.ratio_max.push_back(0.0);
  }
  for (int k = 0; k < fields; ++k) {
    const ScalarField f =
        bandlimited_field(part.plan(Parity::even), part.resolved_limit(), seed + static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < s.q.size(); ++i) {
      const BernsteinResult b = bernstein_check(f, s.q[i], 2.0, 2.0, part);
      if (b.empty) continue;
      s.ratio_min[i] = std::min(s.ratio_min[i], b.ratio);
      s.ratio_max[i] = std::max(s.ratio_max[i], b.ratio);
    }
  }
  return s;
}

bool VerifyResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

VerifyResult run_verify(const VerifyOptions& opt) {
  if (resolved_qmax(opt.grid) < 2)
    throw Error(ErrorCode::grid_too_coarse, "verify: grid " + std::to_string(opt.grid.nr) + " x " +
                                                std::to_string(opt.grid.nz) + " is too coarse for a dyadic partition");
  VerifyResult v;
  auto add = [&](std::string name, double value, double threshold, bool pass, std::string detail = {}) {
    v.checks.push_back({std::move(name), value, threshold, pass, std::move(detail)});
  };
  const std::vector<double> hs = h_ladder(opt.h0, opt.levels);
  const int n = opt.random_fields;
  const std::vector<double> lp_ps{2.0, 4.0, 6.0};

  v.identities = identity_study(hs);
  add("identity.lemLD.order", v.identities.order_lemLD, 1.9, v.identities.order_lemLD >= 1.9);
  add("identity.leme1.order", v.identities.order_leme1, 1.9, v.identities.order_leme1 >= 1.9);

  v.elliptic = elliptic_convergence(hs);
  add("elliptic.manufactured.order", v.elliptic.order, 1.9, v.elliptic.order >= 1.9);

  v.lp_bound = lp_bound_study(hs[std::min<std::size_t>(1, hs.size() - 1)], 4.0, n, opt.seed, lp_ps);
  add("elliptic.lp_bound.resolution", v.lp_bound.resolution_variation, 0.2, v.lp_bound.resolution_variation < 0.2);
  add("elliptic.lp_bound.domain", v.lp_bound.domain_variation, 0.2, v.lp_bound.domain_variation < 0.2);

  v.epsilon = epsilon_study(hs[std::min<std::size_t>(1, hs.size() - 1)], 4.0, n, opt.seed, lp_ps,
                            {1e-1, 1e-2, 1e-3, 1e-4});
  add("elliptic.epsilon.uniform", v.epsilon.max_deviation, 0.2, v.epsilon.max_deviation < 0.2);
  add("elliptic.epsilon.distance_decreasing", v.epsilon.distance.back(), 0.0, v.epsilon.distance_decreasing);

  const std::vector<double> ckn_ps{2.0, 3.0, 4.0};
  v.ckn = ckn_study(opt.grid, n, opt.seed, ckn_ps);
  const double ckn_floor = 1.0 - 10.0 * v.ckn.h * v.ckn.h;
  for (std::size_t i = 0; i < ckn_ps.size(); ++i)
    add("ckn.random.p" + fmt(ckn_ps[i]), v.ckn.min_ratio[i], ckn_floor, v.ckn.min_ratio[i] >= ckn_floor);
  add("ckn.gaussian", v.ckn.gaussian_ratio, 2.0, std::abs(v.ckn.gaussian_ratio - 2.0) <= 0.04);

  v.partition = partition_study(opt.grid, std::min(n, 5), opt.seed);
  add("partition.unity", v.partition.unity, 1e-12, v.partition.unity <= 1e-12);
  add("partition.square_sum", v.partition.square_min, 1.0 / 3.0,
      v.partition.square_min >= 1.0 / 3.0 - 1e-12 && v.partition.square_max <= 1.0 + 1e-12,
      "max " + fmt(v.partition.square_max));
  add("partition.reconstruction", v.partition.reconstruction, 1e-10, v.partition.reconstruction <= 1e-10);

  v.bernstein = bernstein_study(opt.grid, std::min(n, 5), opt.seed);
  for (std::size_t i = 0; i < v.bernstein.q.size(); ++i) {
    const double lo = v.bernstein.ratio_min[i], hi = v.bernstein.ratio_max[i];
    add("bernstein.q" + std::to_string(v.bernstein.q[i]), lo, 0.125, lo >= 0.125 && hi <= 8.0, "max " + fmt(hi));
  }
  return v;
}

}  // namespace axbq
