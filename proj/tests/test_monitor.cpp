#include <gtest/gtest.h>

#include <cmath>

#include "coupling.hpp"
#include "errors.hpp"
#include "monitor.hpp"
#include "test_fields.hpp"

using namespace axbq;
using axbq::testing::gauss;

namespace {

GridSpec box(double h) { return make_uniform_grid(h, 4.0, 4.0); }

TimeSeries simulate(double h, const std::string& preset, double kappa, double t_end = 1.0, int cadence = 1) {
  InitSpec init;
  init.preset = preset;
  StepConfig cfg;
  cfg.dt = 0.02;
  RunOptions opts;
  opts.cadence = cadence;
  opts.record_besov = false;
  return run(make_initial_state(box(h), kappa, init), cfg, t_end, opts).series;
}

// Shared runs; each is a few hundred milliseconds.
const TimeSeries& gaussian0() {
  static const TimeSeries s = simulate(1.0 / 16, "gaussian", 0.0);
  return s;
}
const TimeSeries& gaussian0_fine() {
  static const TimeSeries s = simulate(1.0 / 32, "gaussian", 0.0);
  return s;
}
const TimeSeries& ring0() {
  static const TimeSeries s = simulate(1.0 / 16, "vortex_ring", 0.0);
  return s;
}
const TimeSeries& ring0_fine() {
  static const TimeSeries s = simulate(1.0 / 32, "vortex_ring", 0.0);
  return s;
}

TimeSeries truncated(const TimeSeries& s, double t_max) {
  TimeSeries out = s;
  out.rows.clear();
  for (const auto& row : s.rows)
    if (row.t <= t_max) out.rows.push_back(row);
  return out;
}

int count_fail(const EstimateReport& r, const std::string& family) {
  int n = 0;
  for (const auto& row : r.rows) n += row.name == family && !row.pass;
  return n;
}

}  // namespace

TEST(Report, PassRuleAndOrdering) {
  EstimateReport a, b;
  a.tolerances["x.a"] = 0.1;
  a.add(1.0, "x.a", 1.05, 1.0);
  a.add(0.0, "x.a", 1.2, 1.0);
  b.tolerances["w.b"] = 0.0;
  b.add(0.0, "w.b", 1.0, 1.0);
  EXPECT_TRUE(a.rows[0].pass);
  EXPECT_FALSE(a.rows[1].pass);
  EXPECT_THROW(a.add(0.0, "unknown", 0, 0), Error);
  const EstimateReport m = merge({a, b});
  ASSERT_EQ(m.rows.size(), 3u);
  EXPECT_EQ(m.rows[0].name, "w.b");
  EXPECT_EQ(m.rows[1].name, "x.a");
  EXPECT_EQ(m.rows[2].t, 1.0);
  EXPECT_FALSE(m.passed("x"));
  EXPECT_TRUE(m.passed("w"));
  EXPECT_EQ(m.checks(), (std::vector<std::string>{"w", "x"}));
  EXPECT_EQ(check_of("energy.envelope"), "energy");
}

TEST(Report, VerdictCsv) {
  EstimateReport r;
  r.tolerances["a.x"] = 0.05;
  r.fitted_constants["a.x"] = 1.5;
  r.add(0, "a.x", 1, 1);
  r.add(1, "a.x", 2, 1);
  const std::string csv = verdict_csv(r);
  EXPECT_EQ(csv, "name,pass_count,fail_count,fitted_constant,tolerance\na.x,1,1,1.5,0.050000000000000003\n");
}

TEST(MaxPrinciple, DiffusionRunPasses) {
  const TimeSeries s = simulate(1.0 / 16, "gaussian", 1.0);
  for (double p : {1.0, 2.0, 3.0, HUGE_VAL}) EXPECT_TRUE(check_max_principle(s, p).all_passed()) << p;
}

TEST(MaxPrinciple, SplicedSeriesFailsAfterSplice) {
  const TimeSeries bad = splice(gaussian0(), "l2_rho", 0.5);
  const EstimateReport r = check_max_principle(bad, 2.0);
  for (const auto& row : r.rows) EXPECT_EQ(row.pass, row.t < 0.5) << row.t;
}

TEST(MaxPrinciple, TransportNearlyConservesL2) {
  const auto& rows = gaussian0().rows;
  EXPECT_GT(rows.back().l2_rho, 0.97 * rows.front().l2_rho);
  EXPECT_LE(rows.back().l2_rho, rows.front().l2_rho);
}

TEST(MaxPrinciple, UnknownExponent) {
  EXPECT_THROW(check_max_principle(gaussian0(), 5.0), Error);
  EXPECT_THROW(check_max_principle(TimeSeries{}, 2.0), Error);
}

TEST(Energy, UnforcedRunDissipates) {
  const TimeSeries& s = ring0();
  for (std::size_t k = 1; k < s.rows.size(); ++k) EXPECT_LT(s.rows[k].l2_v, s.rows[k - 1].l2_v);
  EXPECT_TRUE(check_energy(s).all_passed());
}

TEST(Energy, BuoyantRunWithinEnvelope) {
  const EstimateReport r = check_energy(gaussian0());
  EXPECT_TRUE(r.passed("energy"));
  EXPECT_EQ(r.rows.size(), 3 * gaussian0().rows.size());
}

TEST(Energy, SplicedVelocityFails) {
  const EstimateReport r = check_energy(splice(ring0(), "l2_v", 0.5));
  EXPECT_FALSE(r.passed("energy"));
  EXPECT_GT(count_fail(r, "energy.envelope"), 0);
}

TEST(ZetaEnvelope, NavierStokesLimitFitsInitialNorm) {
  const TimeSeries& s = ring0();
  const EstimateReport r = check_zeta_envelope(s, &ring0_fine());
  EXPECT_TRUE(r.all_passed());
  EXPECT_DOUBLE_EQ(r.fitted_constants.at("zeta_envelope.envelope"), s.rows.front().l2_zeta);
  EXPECT_GT(r.rows.size(), s.rows.size());  // monotone rows present
}

TEST(ZetaEnvelope, ZeroData) {
  const TimeSeries s = simulate(1.0 / 8, "zero", 0.0, 0.2);
  EXPECT_EQ(check_zeta_envelope(s).fitted_constants.at("zeta_envelope.envelope"), 0.0);
}

TEST(ZetaEnvelope, BoussinesqFitIsRefinementStable) {
  const EstimateReport r = check_zeta_envelope(gaussian0(), &gaussian0_fine());
  EXPECT_TRUE(r.all_passed());
  const double c = r.fitted_constants.at("zeta_envelope.envelope");
  EXPECT_GT(c, 0.0);
  EXPECT_LT(c, 10.0);
}

TEST(ZetaEnvelope, TruncationNeverIncreasesFit) {
  const double full = check_zeta_envelope(gaussian0()).fitted_constants.at("zeta_envelope.envelope");
  const double part = check_zeta_envelope(truncated(gaussian0(), 0.5)).fitted_constants.at("zeta_envelope.envelope");
  EXPECT_LE(part, full);
}

TEST(ZetaEnvelope, SplicesFail) {
  EXPECT_FALSE(check_zeta_envelope(splice(ring0(), "l2_zeta", 0.5)).all_passed());
  EXPECT_FALSE(check_zeta_envelope(splice(gaussian0(), "l2_zeta", 0.5), &gaussian0_fine()).all_passed());
}

TEST(GammaEnergy, RestDensityReducesToZeta) {
  const TimeSeries s = simulate(1.0 / 16, "vortex_ring", 0.3, 0.4);
  for (const auto& row : s.rows) EXPECT_NEAR(row.l2_gamma, 0.7 * row.l2_zeta, 1e-12 * row.l2_zeta);
  EXPECT_TRUE(check_gamma_energy(s).all_passed());
}

TEST(GammaEnergy, GaussianFitIsFiniteAndStable) {
  const EstimateReport r = check_gamma_energy(gaussian0(), &gaussian0_fine());
  EXPECT_TRUE(r.all_passed());
  EXPECT_TRUE(std::isfinite(r.fitted_constants.at("gamma_energy.envelope")));
}

TEST(GammaEnergy, SplicedSeriesFails) {
  EXPECT_FALSE(check_gamma_energy(splice(gaussian0(), "l2_gamma", 0.5), &gaussian0_fine()).all_passed());
}

TEST(GammaEnergy, NearOneSeriesRejected) {
  const TimeSeries s = simulate(1.0 / 8, "aligned", 1.0, 0.1);
  try {
    check_gamma_energy(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::near_one_branch);
  }
}

TEST(Gamma1Energy, AlignedDataAtKappaOne) {
  const TimeSeries s = simulate(1.0 / 16, "aligned", 1.0);
  const EstimateReport r = check_gamma1_energy(s, 1.0);
  EXPECT_TRUE(r.all_passed());
  for (const auto& row : r.rows) EXPECT_LT(row.lhs, 1e-20);
}

TEST(Gamma1Energy, SourceShrinksTowardsKappaOne) {
  double prev_source = INFINITY;
  for (double kappa : {0.6, 0.9, 0.99}) {
    const EstimateReport r = check_gamma1_energy(simulate(1.0 / 16, "aligned", kappa), kappa);
    EXPECT_TRUE(r.all_passed());
    const double src = r.fitted_constants.at("gamma1_energy.source");
    EXPECT_TRUE(std::isfinite(r.fitted_constants.at("gamma1_energy.C")));
    EXPECT_LT(src, prev_source) << kappa;
    prev_source = src;
  }
}

TEST(Gamma1Energy, WrongBranch) {
  try {
    check_gamma1_energy(gaussian0(), 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::wrong_branch);
  }
}

TEST(Hls, VortexRingRatioIsRefinementStable) {
  const EstimateReport r = check_hls(ring0(), &ring0_fine());
  EXPECT_TRUE(r.all_passed());
  EXPECT_GT(r.fitted_constants.at("hls.ratio"), 0.0);
  EXPECT_EQ(r.flags.count("hls"), 0u);
}

TEST(Hls, ZeroVorticityIsDegenerate) {
  const EstimateReport r = check_hls(simulate(1.0 / 8, "zero", 0.0, 0.1));
  EXPECT_EQ(r.flags.at("hls"), "degenerate");
  EXPECT_TRUE(r.rows.empty());
}

TEST(Hls, RatioIsHomogeneous) {
  const GridSpec g = box(1.0 / 16);
  const ScalarField zeta = ScalarField::sample(g, Parity::even, gauss);
  auto ratio = [&](double lambda) {
    const ScalarField z = lambda * zeta;
    const VelocityRZ v = biot_savart(multiply_by_r(z));
    return lp_norm(vr_over_r(v), 6.0) / lp_norm(z, 2.0);
  };
  const double base = ratio(1.0);
  for (double lambda : {1e-3, 0.5, 7.0, 1e4}) EXPECT_NEAR(ratio(lambda), base, 1e-12 * base);
}

TEST(Hls, SplicedSeriesFails) {
  EXPECT_FALSE(check_hls(splice(ring0(), "l6_vr_over_r", 0.0), &ring0_fine()).all_passed());
}

namespace {

TransportSeries transport(double h, double amplitude, double kappa) {
  const GridSpec g = box(h);
  const ScalarField rho0 = ScalarField::sample(g, Parity::even, [](double r, double z) { return gauss(r, z - 1); });
  StepConfig cfg;
  cfg.dt = 0.02;
  return run_transport_diffusion(rho0, [g, amplitude](double) { return cellular_stream(g, amplitude); }, kappa, cfg,
                                 1.0, 3.0, 5);
}

}  // namespace

TEST(LogEstimate, StillFluid) {
  const EstimateReport r = check_log_estimate(transport(1.0 / 16, 0.0, 0.0));
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.fitted_constants.at("log_estimate.envelope"), 1.0, 1e-12);
}

TEST(LogEstimate, CellularFlowFitIsStable) {
  const TransportSeries a = transport(1.0 / 16, 2.0, 0.0), b = transport(1.0 / 32, 2.0, 0.0);
  const EstimateReport r = check_log_estimate(a, &b);
  EXPECT_TRUE(r.all_passed());
  EXPECT_GT(a.rows.back().int_linf_grad_v, 1.0);
  EXPECT_FALSE(check_log_estimate(splice(a, "besov_rho", 0.5), &b).all_passed());
}

TEST(LogEstimate, VelocityRescaling) {
  const double c1 = check_log_estimate(transport(1.0 / 16, 1.0, 0.0)).fitted_constants.at("log_estimate.envelope");
  const double c2 = check_log_estimate(transport(1.0 / 16, 2.0, 0.0)).fitted_constants.at("log_estimate.envelope");
  EXPECT_NEAR(c2, c1, 0.1 * c1);
}

TEST(LogEstimate, MissingBesov) {
  TransportSeries s = transport(1.0 / 16, 0.0, 0.0);
  s.rows[1].besov_rho = kNaN;
  EXPECT_THROW(check_log_estimate(s), Error);
}

namespace {

struct StabilityFixture {
  SimState base;
  ScalarField direction;
  StepConfig cfg;

  explicit StabilityFixture(double h) {
    InitSpec init;
    init.preset = "gaussian_vortex_ring";
    base = make_initial_state(box(h), 1.0, init);
    direction = axbq::testing::RandomSmoothField::draw(7).sample(base.grid());
    direction *= 1.0 / lp_norm(direction, 2.0);
    cfg.dt = 0.02;
  }
  StateRun perturbed(double delta) const {
    return record_states(make_state(0.0, 1.0, base.rho + delta * direction, base.zeta), cfg, 0.5, 5);
  }
};

}  // namespace

TEST(Stability, IdenticalRunsGiveZero) {
  const StabilityFixture f(1.0 / 16);
  const StateRun a = f.perturbed(0.0), b = f.perturbed(0.0);
  const EstimateReport r = check_stability(a, b);
  EXPECT_TRUE(r.all_passed());
  for (const auto& row : r.rows) EXPECT_EQ(row.lhs, 0.0);
}

TEST(Stability, DistanceIsLinearInPerturbation) {
  const StabilityFixture f(1.0 / 16);
  const StateRun a = f.perturbed(0.0);
  const EstimateReport big = check_stability(a, f.perturbed(1e-3));
  const EstimateReport small = check_stability(a, f.perturbed(1e-4), &big);
  EXPECT_TRUE(small.all_passed());
  EXPECT_NEAR(big.fitted_constants.at("stability.delta0"), 1e-3, 1e-15);
  for (const char* k : {"stability.dv", "stability.drho"}) {
    const double r = small.fitted_constants.at(k) / big.fitted_constants.at(k);
    EXPECT_GT(r, 0.5);
    EXPECT_LT(r, 2.0);
  }
}

TEST(Stability, SplicedDistanceFails) {
  const StabilityFixture f(1.0 / 16);
  const StateRun a = f.perturbed(0.0), b = f.perturbed(1e-3);
  const EstimateReport ref = check_stability(a, b);
  EXPECT_FALSE(check_stability(a, splice(a, b, 0.2), &ref, 1.2).all_passed());
}

TEST(Stability, ConfigMismatch) {
  const StabilityFixture f(1.0 / 16);
  StateRun a = f.perturbed(0.0), b = f.perturbed(1e-3);
  b.cfg.dt = 0.01;
  try {
    check_stability(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config_mismatch);
  }
}

TEST(Stability, NegativeSobolevNorm) {
  const GridSpec g = box(1.0 / 16);
  const ScalarField f = ScalarField::sample(g, Parity::even, gauss);
  EXPECT_EQ(hdot_minus1_norm(ScalarField(g, Parity::even)), 0.0);
  EXPECT_NEAR(hdot_minus1_norm(3.0 * f), 3.0 * hdot_minus1_norm(f), 1e-12);
  // <g, (-Delta)^{-1} g> <= |g|^2 / lambda_min
  EXPECT_LT(hdot_minus1_norm(f), lp_norm(f, 2.0));
}

TEST(Checks, PureAndRepeatable) {
  const EstimateReport a = check_zeta_envelope(gaussian0(), &gaussian0_fine());
  const EstimateReport b = check_zeta_envelope(gaussian0(), &gaussian0_fine());
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].lhs, b.rows[k].lhs);
    EXPECT_EQ(a.rows[k].rhs, b.rows[k].rhs);
  }
}
