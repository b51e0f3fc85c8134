#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "coupling.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "test_fields.hpp"

using namespace axbq;
using axbq::testing::gauss;

namespace {

GridSpec box(double h) { return make_uniform_grid(h, 4.0, 4.0); }

InitSpec preset(const std::string& name) {
  InitSpec s;
  s.preset = name;
  return s;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  return a.raw().size() == b.raw().size() &&
         std::memcmp(a.raw().data(), b.raw().data(), a.raw().size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Step, ZeroStateIsAFixedPoint) {
  SimState s = make_initial_state(box(1.0 / 8), 0.5, preset("zero"));
  StepConfig cfg;
  Integrator integ(s.grid(), s.kappa);
  for (int n = 0; n < 5; ++n) s = integ.step(s, cfg);
  EXPECT_EQ(lp_norm(s.rho, INFINITY), 0.0);
  EXPECT_EQ(lp_norm(s.zeta, INFINITY), 0.0);
  EXPECT_EQ(lp_norm(s.v.vr, INFINITY), 0.0);
  EXPECT_NEAR(s.t, 5 * cfg.dt, 1e-14);
}

TEST(Step, BuoyancyKickFromRest) {
  // rho0 = g, v0 = 0: zeta(dt) ~ 2 dt g
  for (double dt : {1e-3, 5e-4}) {
    const GridSpec g = box(1.0 / 16);
    const SimState s0 = make_initial_state(g, 0.0, preset("gaussian"));
    StepConfig cfg;
    cfg.dt = dt;
    const SimState s1 = step(s0, cfg);
    const ScalarField expected = ScalarField::sample(g, Parity::even, [dt](double r, double z) { return 2 * dt * gauss(r, z); });
    const double rel = lp_norm(s1.zeta - expected, 2.0) / lp_norm(expected, 2.0);
    EXPECT_LT(rel, 2e-2) << "dt " << dt;
  }
}

TEST(Step, NavierStokesLimitZetaNonIncreasing) {
  for (double kappa : {0.0, 1.0}) {
    SimState s = make_initial_state(box(1.0 / 8), kappa, preset("vortex_ring"));
    Integrator integ(s.grid(), kappa);
    StepConfig cfg;
    cfg.dt = 0.02;
    double prev = lp_norm(s.zeta, 2.0);
    while (s.t < 1.0 - 1e-12) {
      s = integ.step(s, cfg);
      const double now = lp_norm(s.zeta, 2.0);
      EXPECT_LE(now, prev * (1 + 1e-12)) << "t " << s.t;
      prev = now;
    }
  }
}

TEST(Step, TransportDoesNotIncreaseMaxDensity) {
  InitSpec init = preset("gaussian_vortex_ring");
  init.zeta_amplitude = 4.0;
  SimState s = make_initial_state(box(1.0 / 8), 0.0, init);
  const double m0 = lp_norm(s.rho, INFINITY);
  Integrator integ(s.grid(), 0.0);
  StepConfig cfg;
  cfg.dt = 0.05;
  for (int n = 0; n < 20; ++n) {
    s = integ.step(s, cfg);
    EXPECT_LE(lp_norm(s.rho, INFINITY), m0 * (1 + 1e-12));
  }
}

TEST(Step, AlignedDataKeepsGammaOneZeroAtKappaOne) {
  SimState s = make_initial_state(box(1.0 / 8), 1.0, preset("aligned"));
  Integrator integ(s.grid(), 1.0);
  StepConfig cfg;
  cfg.dt = 0.05;
  for (int n = 0; n < 10; ++n) s = integ.step(s, cfg);
  EXPECT_LT(lp_norm(integ.gamma(s), 2.0), 1e-12 * lp_norm(s.rho, 2.0));
}

TEST(Step, ParityAndVelocityConsistency) {
  SimState s = make_initial_state(box(1.0 / 8), 0.3, preset("gaussian_vortex_ring"));
  s = step(s, StepConfig{});
  EXPECT_EQ(s.rho.parity(), Parity::even);
  EXPECT_EQ(s.zeta.parity(), Parity::even);
  EXPECT_EQ(s.v.vr.parity(), Parity::odd);
  const VelocityRZ v = velocity_from_stream(StreamSolver(s.grid()).solve(multiply_by_r(s.zeta)));
  EXPECT_LT(lp_norm(v.vr - s.v.vr, INFINITY), 1e-13);
  EXPECT_LT(lp_norm(v.vz - s.v.vz, INFINITY), 1e-13);
}

TEST(Step, CflReducesTimeStep) {
  InitSpec init = preset("vortex_ring");
  init.zeta_amplitude = 50.0;
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, init);
  StepConfig cfg;
  cfg.dt = 1.0;
  const double dt = cfl_dt(s, cfg);
  EXPECT_LT(dt, 1.0);
  double vmax = 0.0;
  for (std::size_t k = 0; k < s.v.vr.raw().size(); ++k)
    vmax = std::max(vmax, std::hypot(s.v.vr.raw()[k], s.v.vz.raw()[k]));
  EXPECT_NEAR(dt * vmax / (1.0 / 8), cfg.cfl_max, 1e-12);
  EXPECT_NEAR(step(s, cfg).t, dt, 1e-15);
  cfg.cfl_max = 1.5;
  EXPECT_THROW(cfl_dt(s, cfg), Error);
}

TEST(Step, RejectsNonPositiveDt) {
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, preset("zero"));
  StepConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(step(s, cfg), Error);
}

TEST(Step, BlowUpGuardFires) {
  InitSpec init = preset("gaussian_vortex_ring");
  init.zeta_amplitude = 1e3;
  init.rho_amplitude = 1e3;
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, init);
  StepConfig cfg;
  cfg.dt = 50.0;
  cfg.cfl_enforce = false;
  cfg.advection_scheme = AdvectionScheme::centered_rk2;
  Integrator integ(s.grid(), 0.0);
  SimState cur = s;
  try {
    for (int n = 0; n < 50; ++n) cur = integ.step(cur, cfg);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.code(), ErrorCode::blow_up);
  }
}

TEST(Step, OmegaFormAgreesWithZetaForm) {
  std::vector<double> hs, diffs;
  for (double h : {1.0 / 8, 1.0 / 16}) {
    InitSpec init = preset("gaussian_vortex_ring");
    const SimState s0 = make_initial_state(box(h), 0.0, init);
    StepConfig a;
    a.dt = h / 4;
    StepConfig b = a;
    b.formulation = Formulation::omega;
    Integrator integ(s0.grid(), 0.0);
    SimState sa = s0, sb = s0;
    while (sa.t < 0.25 - 1e-12) {
      sa = integ.step_exact(sa, a.dt, a);
      sb = integ.step_exact(sb, b.dt, b);
    }
    hs.push_back(h);
    diffs.push_back(lp_norm(sa.zeta - sb.zeta, 2.0) / lp_norm(sa.zeta, 2.0));
  }
  EXPECT_LT(diffs[0], 5e-2);
  EXPECT_LT(diffs[1], diffs[0]);
}

TEST(Advect, StreamFluxesAreDivergenceFree) {
  const GridSpec g = box(1.0 / 8);
  const ScalarField psi = axbq::testing::RandomSmoothField::draw(11).sample(g, Parity::odd);
  const FaceFluxes f = fluxes_from_stream(psi);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) {
      const double div = f.fr_at(i + 1, j) - f.fr_at(i, j) + f.fz_at(i, j + 1) - f.fz_at(i, j);
      worst = std::max(worst, std::abs(div));
      scale = std::max(scale, std::abs(f.fr_at(i + 1, j)));
    }
  EXPECT_LT(worst, 1e-14 * std::max(1.0, scale));
  for (int j = 0; j < g.nz; ++j) {
    EXPECT_EQ(f.fr_at(0, j), 0.0);
    EXPECT_NEAR(f.fr_at(g.nr, j), 0.0, 1e-15);
  }
}

TEST(Advect, ConstantIsPreservedInTheInterior) {
  const GridSpec g = box(1.0 / 8);
  const ScalarField psi = cellular_stream(g, 1.0);
  ScalarField q = ScalarField::sample(g, Parity::even, [](double, double) { return 1.0; });
  const ScalarField out = advect(q, fluxes_from_stream(psi), 0.1, AdvectionScheme::upwind2);
  // No flux crosses the domain boundary, so total mass is conserved.
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) {
      m0 += g.r(i) * q(i, j);
      m1 += g.r(i) * out(i, j);
    }
  EXPECT_NEAR(m1, m0, 1e-11 * m0);
  EXPECT_LT(lp_norm(out - q, INFINITY), 1e-12);
}

TEST(Advect, ParseScheme) {
  EXPECT_EQ(parse_advection_scheme("upwind2"), AdvectionScheme::upwind2);
  EXPECT_EQ(parse_advection_scheme("centered_rk2"), AdvectionScheme::centered_rk2);
  EXPECT_THROW(parse_advection_scheme("weno5"), Error);
}

TEST(Presets, CatalogAndValidation) {
  const GridSpec g = box(1.0 / 8);
  for (const auto& name : preset_names()) EXPECT_NO_THROW(make_initial_state(g, 0.0, preset(name)));
  EXPECT_THROW(make_initial_state(g, 0.0, preset("tornado")), Error);
  EXPECT_THROW(make_initial_state(g, -1.0, preset("zero")), Error);
  const SimState a = make_initial_state(g, 1.0, preset("aligned"));
  EXPECT_EQ(lp_norm(a.zeta - 0.5 * a.rho, INFINITY), 0.0);
}

TEST(Run, EmptyIntervalReturnsInitial) {
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, preset("gaussian"));
  const RunResult r = run(s, StepConfig{}, 0.0);
  EXPECT_TRUE(r.series.empty());
  EXPECT_EQ(r.steps, 0);
  EXPECT_TRUE(bit_equal(r.final_state.rho, s.rho));
}

TEST(Run, EnergyBoundAtKappaZero) {
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, preset("gaussian"));
  StepConfig cfg;
  cfg.dt = 0.02;
  RunOptions opts;
  opts.record_besov = false;
  const RunResult r = run(s, cfg, 1.0, opts);
  ASSERT_GT(r.series.rows.size(), 2u);
  const Sample& s0 = r.series.initial();
  for (const Sample& m : r.series.rows) EXPECT_LE(m.l2_v, s0.l2_v + m.t * s0.l2_rho + 1e-8);
  EXPECT_NEAR(r.series.rows.back().t, 1.0, 1e-14);
  EXPECT_EQ(r.series.branch, "general");
}

TEST(Run, CadenceAndIntegrals) {
  const SimState s = make_initial_state(box(1.0 / 8), 1.0, preset("gaussian_vortex_ring"));
  StepConfig cfg;
  cfg.dt = 0.05;
  RunOptions opts;
  opts.cadence = 3;
  opts.record_besov = false;
  int seen = 0;
  opts.on_sample = [&](const Sample&) { ++seen; };
  const RunResult r = run(s, cfg, 0.5, opts);
  EXPECT_EQ(r.series.branch, "near_one");
  EXPECT_EQ(static_cast<int>(r.series.rows.size()), seen);
  EXPECT_EQ(r.series.rows.size(), 1u + 3u + 1u);  // initial, steps 3, 6, 9, final 10
  for (std::size_t k = 1; k < r.series.rows.size(); ++k) {
    EXPECT_GE(r.series.rows[k].int_grad_v2, r.series.rows[k - 1].int_grad_v2);
    EXPECT_GE(r.series.rows[k].int_grad_rho2, r.series.rows[k - 1].int_grad_rho2);
  }
}

TEST(Run, BesovColumnRecorded) {
  const SimState s = make_initial_state(box(1.0 / 16), 0.0, preset("gaussian"));
  StepConfig cfg;
  cfg.dt = 0.1;
  const RunResult r = run(s, cfg, 0.2);
  for (const Sample& m : r.series.rows) EXPECT_TRUE(std::isfinite(m.besov_b31_0_rho));
}

TEST(Run, Deterministic) {
  const SimState s = make_initial_state(box(1.0 / 8), 0.5, preset("gaussian_vortex_ring"));
  StepConfig cfg;
  cfg.dt = 0.05;
  RunOptions opts;
  opts.record_besov = false;
  const RunResult a = run(s, cfg, 0.5, opts);
  const RunResult b = run(s, cfg, 0.5, opts);
  EXPECT_TRUE(bit_equal(a.final_state.rho, b.final_state.rho));
  EXPECT_TRUE(bit_equal(a.final_state.zeta, b.final_state.zeta));
}

TEST(Run, BlowUpCarriesLastCheckpoint) {
  const auto dir = std::filesystem::temp_directory_path() / "axbq_test_blowup";
  std::filesystem::remove_all(dir);
  InitSpec init = preset("gaussian_vortex_ring");
  init.zeta_amplitude = 1e3;
  init.rho_amplitude = 1e3;
  const SimState s = make_initial_state(box(1.0 / 8), 0.0, init);
  StepConfig cfg;
  cfg.dt = 50.0;
  cfg.cfl_enforce = false;
  cfg.advection_scheme = AdvectionScheme::centered_rk2;
  RunOptions opts;
  opts.record_besov = false;
  opts.checkpoint_dir = dir.string();
  opts.checkpoint_every = 1;
  try {
    run(s, cfg, 5000.0, opts);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_FALSE(e.last_checkpoint().empty());
    EXPECT_TRUE(std::filesystem::exists(e.last_checkpoint()));
    EXPECT_NO_THROW(read_checkpoint(e.last_checkpoint()));
  }
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const auto path = std::filesystem::temp_directory_path() / "axbq_test_roundtrip.axbq";
  SimState s = make_initial_state(make_grid(24, 40, 3.0, -2.0, 5.0), 0.7, preset("gaussian_vortex_ring"));
  s = step(s, StepConfig{});
  write_checkpoint(path.string(), s);
  const SimState back = read_checkpoint(path.string());
  EXPECT_EQ(back.grid(), s.grid());
  EXPECT_EQ(back.t, s.t);
  EXPECT_EQ(back.kappa, s.kappa);
  EXPECT_TRUE(bit_equal(back.rho, s.rho));
  EXPECT_TRUE(bit_equal(back.zeta, s.zeta));
  EXPECT_TRUE(bit_equal(back.v.vr, s.v.vr));
  EXPECT_TRUE(bit_equal(back.v.vz, s.v.vz));
  EXPECT_EQ(std::filesystem::file_size(path), 5u + 8u + 5 * 8u + 4u * 24 * 40 * 8);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsBadInput) {
  EXPECT_THROW(read_checkpoint("/nonexistent/axbq.ckpt"), Error);
  const auto path = std::filesystem::temp_directory_path() / "axbq_test_bad.axbq";
  {
    std::ofstream os(path, std::ios::binary);
    os << "AXBQ2 garbage";
  }
  EXPECT_THROW(read_checkpoint(path.string()), Error);
  std::filesystem::remove(path);
}

TEST(Transport, StillFluidWithoutDiffusionKeepsDensity) {
  const GridSpec g = box(1.0 / 16);
  const ScalarField rho0 = ScalarField::sample(g, Parity::even, gauss);
  const TransportSeries ts =
      run_transport_diffusion(rho0, [&g](double) { return ScalarField(g, Parity::odd); }, 0.0, StepConfig{}, 1.0);
  const double b0 = ts.rows.front().besov_rho;
  for (const auto& row : ts.rows) {
    EXPECT_NEAR(row.besov_rho, b0, 1e-12 * b0);
    EXPECT_EQ(row.int_linf_grad_v, 0.0);
  }
}

TEST(Transport, CellularFlowRespectsLpBounds) {
  const GridSpec g = box(1.0 / 16);
  const ScalarField rho0 = ScalarField::sample(g, Parity::even, [](double r, double z) { return gauss(r, z - 1); });
  StepConfig cfg;
  cfg.dt = 0.05;
  const TransportSeries ts = run_transport_diffusion(rho0, [&g](double) { return cellular_stream(g, 2.0); }, 0.0, cfg, 1.0);
  const auto& r0 = ts.rows.front();
  for (const auto& row : ts.rows) {
    EXPECT_LE(row.l2_rho, r0.l2_rho * (1 + 1e-12));
    EXPECT_LE(row.linf_rho, r0.linf_rho * (1 + 1e-12));
  }
  EXPECT_GT(ts.rows.back().int_linf_grad_v, 0.0);
}

TEST(Transport, DiffusionDissipatesEnergy) {
  const GridSpec g = box(1.0 / 16);
  const ScalarField rho0 = ScalarField::sample(g, Parity::even, gauss);
  StepConfig cfg;
  cfg.dt = 0.02;
  const double kappa = 1.0;
  const TransportSeries ts =
      run_transport_diffusion(rho0, [&g](double) { return ScalarField(g, Parity::odd); }, kappa, cfg, 1.0);
  for (std::size_t k = 1; k < ts.rows.size(); ++k) EXPECT_LT(ts.rows[k].l2_rho, ts.rows[k - 1].l2_rho);
  const double l2_0 = ts.rows.front().l2_rho;
  EXPECT_LE(std::sqrt(kappa * ts.rows.back().int_grad_rho2), l2_0 + 1e-8);
}
