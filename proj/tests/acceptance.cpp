// Acceptance suite: one PASS/FAIL line per criterion AC1..AC14 on the desk
// grid [0, 4] x [-4, 4] with h = 1/32 (128 x 256), t in [0, 1].
// Exit status 0 when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "coupling.hpp"
#include "diffops.hpp"
#include "evolve.hpp"
#include "fields.hpp"
#include "monitor.hpp"
#include "studies.hpp"

using namespace axbq;

namespace {

constexpr double kH = 1.0 / 32;
constexpr double kBox = 4.0;
constexpr std::uint64_t kSeed = 1;
constexpr int kFields = 20;

GridSpec desk(double h = kH) { return make_uniform_grid(h, kBox, kBox); }

StepConfig step_cfg() { return ExperimentConfig{}.step_config(); }

TimeSeries simulate(double h, const std::string& preset, double kappa) {
  InitSpec init;
  init.preset = preset;
  RunOptions opts;
  opts.record_besov = false;
  opts.label = preset;
  return run(make_initial_state(desk(h), kappa, init), step_cfg(), 1.0, opts).series;
}

// A desk run and its companion at twice the spacing.
struct Pair {
  TimeSeries fine, coarse;
};

Pair simulate_pair(const std::string& preset, double kappa) {
  return {simulate(kH, preset, kappa), simulate(2 * kH, preset, kappa)};
}

std::string g(double x, int digits = 4) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << x;
  return ss.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += !o.pass;
  std::printf("%s %s %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), sec);
  std::fflush(stdout);
}

std::set<std::string> failing_checks(const EstimateReport& r) {
  std::set<std::string> out;
  for (const auto& row : r.rows)
    if (!row.pass) out.insert(check_of(row.name));
  return out;
}

std::string join(const std::set<std::string>& s) {
  if (s.empty()) return "none";
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : "+") + x;
  return out;
}

// Every series check that applies to the run's branch.
EstimateReport series_checks(const TimeSeries& s, const TimeSeries& companion) {
  std::vector<EstimateReport> r;
  r.push_back(check_max_principle(s, 2.0));
  r.push_back(check_max_principle(s, HUGE_VAL));
  r.push_back(check_energy(s));
  r.push_back(check_zeta_envelope(s, &companion));
  if (branch_for(s.kappa) == Branch::general)
    r.push_back(check_gamma_energy(s, &companion));
  else
    r.push_back(check_gamma1_energy(s, s.kappa, &companion));
  r.push_back(check_hls(s, &companion));
  return merge(r);
}

TransportSeries transport(double h, double kappa) {
  const GridSpec grid = desk(h);
  InitSpec init;
  const ScalarField rho0 = make_initial_state(grid, kappa, init).rho;
  const ScalarField psi = cellular_stream(grid, 2.0);
  return run_transport_diffusion(rho0, [psi](double) { return psi; }, kappa, step_cfg(), 1.0, 3.0, 5);
}

struct Stability {
  StateRun base, big, small;
};

Stability stability_runs(double h) {
  InitSpec init;
  init.preset = "gaussian_vortex_ring";
  const SimState s0 = make_initial_state(desk(h), 1.0, init);
  ScalarField dir = RandomSmoothField::draw(kSeed).sample(s0.grid());
  dir *= 1.0 / lp_norm(dir, 2.0);
  auto perturbed = [&](double delta) {
    return record_states(make_state(0.0, 1.0, s0.rho + delta * dir, s0.zeta), step_cfg(), 1.0, 10);
  };
  return {record_states(s0, step_cfg(), 1.0, 10), perturbed(1e-3), perturbed(1e-4)};
}

}  // namespace

int main() {
  std::printf("desk grid %d x %d, h = %s, t_end = 1, dt = %s\n", desk().nr, desk().nz, g(kH).c_str(),
              g(step_cfg().dt).c_str());

  std::map<double, Pair> gaussian;
  report("AC1", "maximum principle", [&] {
    bool ok = true;
    std::string d;
    for (double kappa : {0.0, 0.5, 1.0}) {
      gaussian[kappa] = simulate_pair("gaussian", kappa);
      const TimeSeries& s = gaussian[kappa].fine;
      double worst = 0.0;
      for (double p : {2.0, HUGE_VAL}) {
        const EstimateReport r = check_max_principle(s, p);
        ok = ok && r.all_passed();
        for (const auto& row : r.rows) worst = std::max(worst, row.lhs / row.rhs);
      }
      d += (d.empty() ? "" : ", ") + std::string("kappa ") + g(kappa) + " max ratio " + g(worst, 6);
    }
    return Outcome{ok, d + " (limit 1.01)"};
  });

  Pair ring_gauss;
  report("AC2", "velocity energy", [&] {
    ring_gauss = simulate_pair("gaussian_vortex_ring", 0.0);
    const TimeSeries& s = ring_gauss.fine;
    const EstimateReport r = check_energy(s);
    double worst = 0.0;
    for (const auto& row : r.rows)
      if (row.name == "energy.envelope") worst = std::max(worst, row.lhs / row.rhs);
    // Literal form without the 1/2 on the left.
    const double v0 = s.rows.front().l2_v, r0 = s.rows.front().l2_rho;
    double literal = 0.0;
    for (const auto& row : s.rows)
      literal = std::max(literal, (row.l2_v * row.l2_v + row.int_grad_v2) /
                                      (0.5 * v0 * v0 + (v0 + row.t * r0) * r0 * row.t));
    return Outcome{r.passed("energy"), "max lhs/rhs " + g(worst) + " (limit 1.05); form with |v|^2 on the left: " +
                                           g(literal) + (literal <= 1.05 ? " pass" : " fail, see notes")};
  });

  Pair ring;
  report("AC3", "Navier-Stokes zeta monotonicity", [&] {
    ring = simulate_pair("vortex_ring", 0.0);
    const EstimateReport r = check_zeta_envelope(ring.fine);
    int rows = 0;
    double worst = 0.0;
    for (const auto& row : r.rows)
      if (row.name == "zeta_envelope.monotone") {
        ++rows;
        worst = std::max(worst, row.lhs / row.rhs - 1.0);
      }
    return Outcome{rows > 0 && r.passed("zeta_envelope"),
                   std::to_string(rows) + " steps, max growth per step " + g(worst) + " (limit 1e-3)"};
  });

  const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  IdentityStudy ids;
  report("AC4", "commutator identity order", [&] {
    ids = identity_study(hs);
    return Outcome{ids.order_lemLD >= 1.9, "order " + g(ids.order_lemLD) + ", residuals " + g(ids.residual_lemLD[0]) +
                                                " " + g(ids.residual_lemLD[1]) + " " + g(ids.residual_lemLD[2])};
  });
  report("AC5", "second identity order", [&] {
    return Outcome{ids.order_leme1 >= 1.9, "order " + g(ids.order_leme1) + ", residuals " + g(ids.residual_leme1[0]) +
                                                " " + g(ids.residual_leme1[1]) + " " + g(ids.residual_leme1[2])};
  });

  report("AC6", "singular elliptic Lp bound", [&] {
    const LpBoundStudy s = lp_bound_study(kH, kBox, kFields, kSeed, {2.0, 4.0, 6.0});
    std::string d = "max ratios p=2,4,6: " + g(s.coarse[0]) + " " + g(s.coarse[1]) + " " + g(s.coarse[2]);
    d += "; resolution variation " + g(s.resolution_variation) + ", domain variation " + g(s.domain_variation) +
         " (limit 0.2)";
    return Outcome{s.resolution_variation < 0.2 && s.domain_variation < 0.2, d};
  });

  report("AC7", "epsilon uniformity", [&] {
    const EpsilonStudy s = epsilon_study(kH, kBox, kFields, kSeed, {2.0, 4.0, 6.0}, {1e-1, 1e-2, 1e-3, 1e-4});
    std::string d = "max deviation " + g(s.max_deviation) + " (limit 0.2); distances";
    for (double x : s.distance) d += " " + g(x, 3);
    return Outcome{s.max_deviation < 0.2 && s.distance_decreasing, d};
  });

  report("AC8", "CKN inequality", [&] {
    const CknStudy s = ckn_study(desk(), kFields, kSeed, {2.0, 3.0, 4.0});
    const double floor = 1.0 - 10.0 * s.h * s.h;
    bool ok = std::abs(s.gaussian_ratio - 2.0) <= 0.04;
    for (double m : s.min_ratio) ok = ok && m >= floor;
    return Outcome{ok, "min ratios p=2,3,4: " + g(s.min_ratio[0]) + " " + g(s.min_ratio[1]) + " " +
                           g(s.min_ratio[2]) + " (floor " + g(floor, 6) + "); Gaussian " + g(s.gaussian_ratio, 6)};
  });

  report("AC9", "partition of unity", [&] {
    const PartitionStudy s = partition_study(desk(), 5, kSeed);
    const bool ok = s.unity <= 1e-12 && s.square_min >= 1.0 / 3.0 - 1e-12 && s.square_max <= 1.0 + 1e-12 &&
                    s.reconstruction <= 1e-10;
    return Outcome{ok, "unity defect " + g(s.unity) + ", squares in [" + g(s.square_min) + ", " + g(s.square_max) +
                           "], reconstruction " + g(s.reconstruction)};
  });

  report("AC10", "Bernstein bracket", [&] {
    const BernsteinStudy s = bernstein_study(desk(), 5, kSeed);
    bool ok = !s.q.empty();
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
      lo = std::min(lo, s.ratio_min[i]);
      hi = std::max(hi, s.ratio_max[i]);
      ok = ok && s.ratio_min[i] >= 0.125 && s.ratio_max[i] <= 8.0;
    }
    return Outcome{ok, "q = 1.." + std::to_string(s.q.empty() ? 0 : s.q.back()) + ", |grad D_q f|/(2^q |D_q f|) in [" +
                           g(lo) + ", " + g(hi) + "] (bracket [1/8, 8])"};
  });

  report("AC11", "logarithmic estimate", [&] {
    bool ok = true;
    std::string d;
    for (double kappa : {0.0, 1.0}) {
      const TransportSeries fine = transport(kH, kappa), coarse = transport(2 * kH, kappa);
      const EstimateReport r = check_log_estimate(fine, &coarse);
      const double cf = r.fitted_constants.at("log_estimate.envelope");
      const double cc = check_log_estimate(coarse).fitted_constants.at("log_estimate.envelope");
      const double var = std::abs(cf / cc - 1.0);
      ok = ok && std::isfinite(cf) && var < 0.2 && r.all_passed();
      d += (d.empty() ? "" : "; ") + std::string("kappa ") + g(kappa) + " C " + g(cf) + " vs " + g(cc) +
           " at 2h, int|grad v|_inf " + g(fine.rows.back().int_linf_grad_v);
    }
    return Outcome{ok, d};
  });

  report("AC12", "near-one source constant", [&] {
    bool ok = true;
    double prev = INFINITY;
    std::string d = "source";
    for (double kappa : {0.6, 0.8, 0.9, 0.99}) {
      const TimeSeries s = simulate(kH, "aligned", kappa);
      const EstimateReport r = check_gamma1_energy(s, kappa);
      const double src = r.fitted_constants.at("gamma1_energy.source");
      ok = ok && r.all_passed() && src < prev;
      prev = src;
      d += " " + g(src, 3);
    }
    return Outcome{ok, d + " over kappa 0.6 0.8 0.9 0.99"};
  });

  Stability stab;
  report("AC13", "stability proxy", [&] {
    stab = stability_runs(kH);
    const EstimateReport big = check_stability(stab.base, stab.big);
    const EstimateReport small = check_stability(stab.base, stab.small, &big, 2.0);
    std::string d;
    for (const char* k : {"stability.dv", "stability.drho"})
      d += std::string(d.empty() ? "" : ", ") + k + " C " + g(big.fitted_constants.at(k)) + " / " +
           g(small.fitted_constants.at(k));
    return Outcome{small.all_passed(), d + " at delta 1e-3 / 1e-4 (factor 2)"};
  });

  report("AC14", "harness self-test", [&] {
    bool ok = true;
    std::vector<std::string> out;
    auto expect = [&](const std::string& label, const std::set<std::string>& control,
                      const std::set<std::string>& spliced, const std::string& target) {
      const bool good = control.empty() && spliced == std::set<std::string>{target};
      ok = ok && good;
      out.push_back(label + " -> " + join(spliced) + (good ? "" : " (control: " + join(control) + ")"));
    };
    // Splices start at t = 0.1, where every spliced norm still carries a
    // sizeable share of its checked quantity.
    const Pair aligned = simulate_pair("aligned", 0.9);
    struct Case {
      const Pair* run;
      const char* column;
      const char* target;
    };
    const Case cases[] = {
        {&gaussian[0.0], "l2_rho", "max_principle"}, {&gaussian[0.0], "linf_rho", "max_principle"},
        {&ring_gauss, "l2_v", "energy"},             {&ring_gauss, "l2_zeta", "zeta_envelope"},
        {&ring_gauss, "l2_gamma", "gamma_energy"},   {&aligned, "l2_gamma", "gamma1_energy"},
        {&ring_gauss, "l6_vr_over_r", "hls"},
    };
    for (const Case& c : cases) {
      const auto control = failing_checks(series_checks(c.run->fine, c.run->coarse));
      const auto spliced = failing_checks(series_checks(splice(c.run->fine, c.column, 0.1), c.run->coarse));
      expect(std::string(c.column) + "@" + c.run->fine.label + "/kappa" + g(c.run->fine.kappa), control, spliced,
             c.target);
    }

    const TransportSeries tf = transport(kH, 0.0), tc = transport(2 * kH, 0.0);
    expect("besov_rho@transport", failing_checks(check_log_estimate(tf, &tc)),
           failing_checks(check_log_estimate(splice(tf, "besov_rho", 0.1), &tc)), "log_estimate");

    const Stability coarse = stability_runs(2 * kH);
    const EstimateReport ref = check_stability(coarse.base, coarse.big);
    expect("distance@stability", failing_checks(check_stability(stab.base, stab.big, &ref, 1.0 + kRefinementBand)),
           failing_checks(check_stability(stab.base, splice(stab.base, stab.big, 0.1), &ref, 1.0 + kRefinementBand)),
           "stability");

    set_stencil_mutation(true);
    IdentityStudy mutated;
    try {
      mutated = identity_study(hs);
    } catch (...) {
      set_stencil_mutation(false);
      throw;
    }
    set_stencil_mutation(false);
    const bool caught = mutated.order_lemLD < 1.9;
    ok = ok && caught;
    out.push_back("stencil mutation -> lemLD order " + g(mutated.order_lemLD) + ", leme1 order " +
                  g(mutated.order_leme1));

    std::string d;
    for (const auto& s : out) d += (d.empty() ? "" : "; ") + s;
    return Outcome{ok, d};
  });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
