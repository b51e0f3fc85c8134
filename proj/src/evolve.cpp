#include "evolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "coupling.hpp"
#include "errors.hpp"

namespace axbq {

namespace {

constexpr double kSubstepCourant = 0.5;
constexpr std::size_t kSolverCacheSize = 8;

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

void guard(const ScalarField& f, const char* name, double t) {
  const double m = max_abs(f);
  if (!(m <= kOverflowGuard)) {
    throw BlowUpError(std::string("overflow guard: max |") + name + "| = " + std::to_string(m) +
                          " exceeds 1e8 at t = " + std::to_string(t),
                      t);
  }
}

// Face value for the flux F across the face between cells k and k+1 of a
// line; q(k) must accept k in [-1, n].
template <class Q>
double face_value(const Q& q, int k, double flux, AdvectionScheme scheme) {
  const double ql = q(k), qr = q(k + 1);
  if (scheme == AdvectionScheme::centered_rk2) return 0.5 * (ql + qr);
  if (flux >= 0.0) return ql + 0.5 * minmod(ql - q(k - 1), qr - ql);
  return qr - 0.5 * minmod(qr - ql, q(k + 2) - qr);
}

// -(1/V) sum of outgoing fluxes times face values.
ScalarField advection_rate(const ScalarField& q, const FaceFluxes& f, AdvectionScheme scheme) {
  const GridSpec& g = q.grid();
  const int nr = g.nr, nz = g.nz;
  // Net flux out of each cell, accumulated face by face.
  std::vector<double> net(g.size(), 0.0);
  for (int a = 1; a < nr; ++a) {
    for (int j = 0; j < nz; ++j) {
      const double F = f.fr_at(a, j);
      if (F == 0.0) continue;
      auto line = [&](int k) -> double {
        if (k < 0 || k >= nr) return q.ghost(std::clamp(k, -1, nr), j);
        return q(k, j);
      };
      const double flux = F * face_value(line, a - 1, F, scheme);
      net[static_cast<std::size_t>(a - 1) * nz + j] += flux;
      net[static_cast<std::size_t>(a) * nz + j] -= flux;
    }
  }
  for (int i = 0; i < nr; ++i) {
    for (int b = 1; b < nz; ++b) {
      const double F = f.fz_at(i, b);
      if (F == 0.0) continue;
      auto line = [&](int k) -> double {
        if (k < 0 || k >= nz) return q.ghost(i, std::clamp(k, -1, nz));
        return q(i, k);
      };
      const double flux = F * face_value(line, b - 1, F, scheme);
      net[static_cast<std::size_t>(i) * nz + b - 1] += flux;
      net[static_cast<std::size_t>(i) * nz + b] -= flux;
    }
  }
  ScalarField out(g, q.parity());
  const double cell = g.dr() * g.dz();
  for (int i = 0; i < nr; ++i) {
    const double inv_v = 1.0 / (g.r(i) * cell);
    for (int j = 0; j < nz; ++j) out(i, j) = -inv_v * net[static_cast<std::size_t>(i) * nz + j];
  }
  return out;
}

ScalarField advect_stage(const ScalarField& q, const FaceFluxes& f, double dt, AdvectionScheme scheme) {
  // SSP-RK2 (Heun)
  ScalarField q1 = q;
  q1 += dt * advection_rate(q, f, scheme);
  ScalarField q2 = q1;
  q2 += dt * advection_rate(q1, f, scheme);
  ScalarField out = q;
  out += q2;
  out *= 0.5;
  return out;
}

ScalarField advect_impl(const ScalarField& q, const FaceFluxes& f, double dt, AdvectionScheme scheme,
                        bool subcycle) {
  int n = 1;
  if (subcycle) {
    const double c = outflow_courant(f, dt);
    n = std::max(1, static_cast<int>(std::ceil(c / kSubstepCourant)));
  }
  const double h = dt / n;
  ScalarField out = q;
  for (int s = 0; s < n; ++s) out = advect_stage(out, f, h, scheme);
  return out;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorCode::io_error, "checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorCode::io_error, "checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(v);
}

struct StepDiag {
  double h1_v = 0.0, linf_grad_v = 0.0, h1_gamma = 0.0, h1_rho = 0.0;
};

StepDiag step_diag(const SimState& s, Integrator& integ) {
  StepDiag d;
  const GradientNorms gn = velocity_gradient_norms(s.v);
  d.h1_v = gn.l2;
  d.linf_grad_v = gn.linf;
  d.h1_gamma = gradient_l2(integ.gamma(s));
  d.h1_rho = gradient_l2(s.rho);
  return d;
}

}  // namespace

const char* to_string(AdvectionScheme s) { return s == AdvectionScheme::upwind2 ? "upwind2" : "centered_rk2"; }

AdvectionScheme parse_advection_scheme(const std::string& s) {
  if (s == "upwind2") return AdvectionScheme::upwind2;
  if (s == "centered_rk2") return AdvectionScheme::centered_rk2;
  throw Error(ErrorCode::validation_error, "unknown advection scheme '" + s + "'");
}

void refresh_velocity(SimState& s) {
  const StreamSolver solver(s.grid());
  s.psi = solver.solve(multiply_by_r(s.zeta));
  s.v = velocity_from_stream(s.psi);
}

SimState make_state(double t, double kappa, ScalarField rho, ScalarField zeta) {
  require_parity(rho, Parity::even, "make_state(rho)");
  require_parity(zeta, Parity::even, "make_state(zeta)");
  require_same_grid(rho, zeta, "make_state");
  if (!(kappa >= 0.0)) throw Error(ErrorCode::invalid_argument, "make_state: kappa must be >= 0");
  SimState s;
  s.t = t;
  s.kappa = kappa;
  s.rho = std::move(rho);
  s.zeta = std::move(zeta);
  refresh_velocity(s);
  return s;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"zero", "gaussian", "vortex_ring", "gaussian_vortex_ring", "aligned"};
  return names;
}

SimState make_initial_state(const GridSpec& grid, double kappa, const InitSpec& init) {
  auto bump = [&grid](double amp, double width, double center) {
    return ScalarField::sample(grid, Parity::even, [=](double r, double z) {
      const double dz = z - center;
      return amp * std::exp(-(r * r + dz * dz) / (width * width));
    });
  };
  ScalarField rho(grid, Parity::even), zeta(grid, Parity::even);
  const std::string& p = init.preset;
  if (p == "zero") {
  } else if (p == "gaussian") {
    rho = bump(init.rho_amplitude, init.rho_width, init.rho_center);
  } else if (p == "vortex_ring") {
    zeta = bump(init.zeta_amplitude, init.zeta_width, init.zeta_center);
  } else if (p == "gaussian_vortex_ring") {
    rho = bump(init.rho_amplitude, init.rho_width, init.rho_center);
    zeta = bump(init.zeta_amplitude, init.zeta_width, init.zeta_center);
  } else if (p == "aligned") {
    rho = bump(init.rho_amplitude, init.rho_width, init.rho_center);
    zeta = 0.5 * rho;
  } else {
    throw Error(ErrorCode::validation_error, "unknown preset '" + p + "'");
  }
  return make_state(0.0, kappa, std::move(rho), std::move(zeta));
}

FaceFluxes fluxes_from_stream(const ScalarField& psi) {
  require_parity(psi, Parity::odd, "fluxes_from_stream");
  const GridSpec& g = psi.grid();
  const int nr = g.nr, nz = g.nz;
  // Stokes stream function at corners (a, b), a = 0..nr, b = 0..nz.
  std::vector<double> corner(static_cast<std::size_t>(nr + 1) * (nz + 1));
  auto C = [&](int a, int b) -> double& { return corner[static_cast<std::size_t>(a) * (nz + 1) + b]; };
  for (int a = 0; a <= nr; ++a) {
    const double rc = a * g.dr();
    for (int b = 0; b <= nz; ++b) {
      const double avg =
          0.25 * (psi.ghost(a - 1, b - 1) + psi.ghost(a, b - 1) + psi.ghost(a - 1, b) + psi.ghost(a, b));
      C(a, b) = rc * avg;
    }
  }
  FaceFluxes f;
  f.grid = g;
  f.fr.assign(static_cast<std::size_t>(nr + 1) * nz, 0.0);
  f.fz.assign(static_cast<std::size_t>(nr) * (nz + 1), 0.0);
  for (int a = 0; a <= nr; ++a)
    for (int j = 0; j < nz; ++j) f.fr[static_cast<std::size_t>(a) * nz + j] = -(C(a, j + 1) - C(a, j));
  for (int i = 0; i < nr; ++i)
    for (int b = 0; b <= nz; ++b) f.fz[static_cast<std::size_t>(i) * (nz + 1) + b] = C(i + 1, b) - C(i, b);
  return f;
}

double outflow_courant(const FaceFluxes& f, double dt) {
  const GridSpec& g = f.grid;
  double c = 0.0;
  const double cell = g.dr() * g.dz();
  for (int i = 0; i < g.nr; ++i) {
    const double inv_v = 1.0 / (g.r(i) * cell);
    for (int j = 0; j < g.nz; ++j) {
      const double out = std::max(0.0, f.fr_at(i + 1, j)) + std::max(0.0, -f.fr_at(i, j)) +
                         std::max(0.0, f.fz_at(i, j + 1)) + std::max(0.0, -f.fz_at(i, j));
      c = std::max(c, dt * out * inv_v);
    }
  }
  return c;
}

ScalarField advect(const ScalarField& q, const FaceFluxes& f, double dt, AdvectionScheme scheme) {
  return advect_impl(q, f, dt, scheme, true);
}

double cfl_dt(const SimState& s, const StepConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::invalid_argument, "step: dt must be > 0");
  if (!(cfg.cfl_max > 0.0 && cfg.cfl_max <= 1.0))
    throw Error(ErrorCode::invalid_argument, "step: cfl_max must lie in (0, 1]");
  double vmax = 0.0;
  for (std::size_t k = 0; k < s.v.vr.raw().size(); ++k)
    vmax = std::max(vmax, std::hypot(s.v.vr.raw()[k], s.v.vz.raw()[k]));
  const GridSpec& g = s.grid();
  const double hmin = std::min(g.dr(), g.dz());
  if (vmax == 0.0) return cfg.dt;
  return std::min(cfg.dt, cfg.cfl_max * hmin / vmax);
}

Integrator::Integrator(const GridSpec& grid, double kappa)
    : grid_(grid), kappa_(kappa), stream_(grid), l_solver_(modified_stencil(grid), 0.0, 1.0) {
  if (!(kappa >= 0.0)) throw Error(ErrorCode::invalid_argument, "Integrator: kappa must be >= 0");
}

namespace {

const AxisymSolver& cached(std::map<double, AxisymSolver>& cache, double dt,
                           const std::function<AxisymSolver()>& make) {
  auto it = cache.find(dt);
  if (it != cache.end()) return it->second;
  if (cache.size() >= kSolverCacheSize) cache.clear();
  return cache.emplace(dt, make()).first->second;
}

}  // namespace

const AxisymSolver& Integrator::rho_solver(double dt) {
  return cached(rho_cache_, dt, [&] { return AxisymSolver(laplacian_stencil(grid_), 1.0, -dt * kappa_); });
}

const AxisymSolver& Integrator::zeta_solver(double dt) {
  return cached(zeta_cache_, dt, [&] { return AxisymSolver(modified_stencil(grid_), 1.0, -dt); });
}

const AxisymSolver& Integrator::omega_solver(double dt) {
  return cached(omega_cache_, dt, [&] { return AxisymSolver(stream_stencil(grid_), 1.0, -dt); });
}

ScalarField Integrator::diffuse_rho(const ScalarField& rho, double dt) {
  if (kappa_ == 0.0) return rho;
  return rho_solver(dt).solve(rho).x;
}

ScalarField Integrator::apply_L(const ScalarField& rho) { return l_solver_.solve(dr_over_r(rho)).x; }

ScalarField Integrator::gamma(const SimState& s) {
  if (branch_for(kappa_) == Branch::near_one) return gamma_near_one(s.zeta, s.rho);
  ScalarField g = (1.0 - kappa_) * s.zeta;
  g -= apply_L(s.rho);
  return g;
}

const DyadicPartition* Integrator::partition() {
  if (!partition_tried_) {
    partition_tried_ = true;
    try {
      partition_ = std::make_shared<DyadicPartition>(build_partition(grid_));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::grid_too_coarse) throw;
    }
  }
  return partition_.get();
}

SimState Integrator::step(const SimState& s, const StepConfig& cfg) {
  const double dt = cfg.cfl_enforce ? cfl_dt(s, cfg) : cfg.dt;
  return step_exact(s, dt, cfg);
}

SimState Integrator::step_exact(const SimState& s, double dt, const StepConfig& cfg) {
  if (!(s.grid() == grid_)) throw Error(ErrorCode::invalid_dimension, "Integrator: grid mismatch");
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "step: dt must be > 0");
  return cfg.formulation == Formulation::zeta ? step_zeta(s, dt, cfg) : step_omega(s, dt, cfg);
}

SimState Integrator::step_zeta(const SimState& s, double dt, const StepConfig& cfg) {
  const FaceFluxes f = fluxes_from_stream(s.psi);
  ScalarField rho = advect_impl(s.rho, f, dt, cfg.advection_scheme, cfg.cfl_enforce);
  ScalarField zeta = advect_impl(s.zeta, f, dt, cfg.advection_scheme, cfg.cfl_enforce);
  const double t = s.t + dt;
  guard(rho, "rho", t);
  guard(zeta, "zeta", t);
  if (kappa_ > 0.0) rho = rho_solver(dt).solve(rho).x;
  ScalarField rhs = zeta;
  rhs -= dt * dr_over_r(rho);
  zeta = zeta_solver(dt).solve(rhs).x;

  SimState out;
  out.t = t;
  out.kappa = kappa_;
  out.rho = std::move(rho);
  out.zeta = std::move(zeta);
  out.psi = stream_.solve(multiply_by_r(out.zeta));
  out.v = velocity_from_stream(out.psi);
  guard(out.v.vr, "v^r", t);
  guard(out.v.vz, "v^z", t);
#ifndef NDEBUG
  require_parity(out.rho, Parity::even, "step(rho)");
  require_parity(out.zeta, Parity::even, "step(zeta)");
  require_parity(out.v.vr, Parity::odd, "step(v^r)");
#endif
  return out;
}

SimState Integrator::step_omega(const SimState& s, double dt, const StepConfig& cfg) {
  const FaceFluxes f = fluxes_from_stream(s.psi);
  const ScalarField omega0 = multiply_by_r(s.zeta);
  ScalarField rho = advect_impl(s.rho, f, dt, cfg.advection_scheme, cfg.cfl_enforce);
  ScalarField omega = advect_impl(omega0, f, dt, cfg.advection_scheme, cfg.cfl_enforce);
  // vortex stretching (v^r / r) omega_theta, explicit
  const ScalarField stretch = vr_over_r(s.v);
  for (std::size_t k = 0; k < omega.raw().size(); ++k) omega.raw()[k] += dt * stretch.raw()[k] * omega0.raw()[k];
  const double t = s.t + dt;
  guard(rho, "rho", t);
  guard(omega, "omega", t);
  if (kappa_ > 0.0) rho = rho_solver(dt).solve(rho).x;
  ScalarField rhs = omega;
  rhs -= dt * d_r(rho);
  omega = omega_solver(dt).solve(rhs).x;

  SimState out;
  out.t = t;
  out.kappa = kappa_;
  out.rho = std::move(rho);
  out.zeta = divide_by_r(omega);
  out.psi = stream_.solve(omega);
  out.v = velocity_from_stream(out.psi);
  guard(out.v.vr, "v^r", t);
  guard(out.v.vz, "v^z", t);
  return out;
}

SimState step(const SimState& s, const StepConfig& cfg) {
  Integrator integ(s.grid(), s.kappa);
  return integ.step(s, cfg);
}

Sample measure(const SimState& s, Integrator& integ, bool with_besov, bool with_besov_velocity) {
  Sample m;
  m.t = s.t;
  m.l1_rho = lp_norm(s.rho, 1.0);
  m.l2_rho = lp_norm(s.rho, 2.0);
  m.l3_rho = lp_norm(s.rho, 3.0);
  m.linf_rho = lp_norm(s.rho, INFINITY);
  m.h1_rho = gradient_l2(s.rho);
  m.l2_v = l2_norm(s.v);
  const GradientNorms gn = velocity_gradient_norms(s.v);
  m.h1_v = gn.l2;
  m.linf_grad_v = gn.linf;
  m.l2_zeta = lp_norm(s.zeta, 2.0);
  m.l2_omega = lp_norm(multiply_by_r(s.zeta), 2.0);
  const ScalarField gamma = integ.gamma(s);
  m.l2_gamma = lp_norm(gamma, 2.0);
  m.h1_gamma = gradient_l2(gamma);
  m.l6_vr_over_r = lp_norm(vr_over_r(s.v), 6.0);
  if (with_besov || with_besov_velocity) {
    if (const DyadicPartition* part = integ.partition()) {
      if (with_besov) m.besov_b31_0_rho = besov_norm(s.rho, 0.0, 3.0, 1.0, *part);
      if (with_besov_velocity) m.besov_bp1_1p3p_v = besov_norm(s.v, 1.0 + 3.0 / 2.0, 2.0, 1.0, *part);
    }
  }
  return m;
}

RunResult run(const SimState& initial, const StepConfig& cfg, double t_end, const RunOptions& opts) {
  if (!(t_end >= initial.t)) throw Error(ErrorCode::invalid_argument, "run: t_end must be >= initial time");
  if (opts.cadence < 1) throw Error(ErrorCode::invalid_argument, "run: cadence must be >= 1");
  Integrator integ(initial.grid(), initial.kappa);
  RunResult res;
  res.series.grid = initial.grid();
  res.series.kappa = initial.kappa;
  res.series.branch = to_string(branch_for(initial.kappa));
  res.series.label = opts.label;
  res.final_state = initial;
  if (t_end == initial.t) return res;

  std::string last_checkpoint;
  auto checkpoint = [&](const SimState& s, long n) {
    if (opts.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(opts.checkpoint_dir);
    const std::string path = (std::filesystem::path(opts.checkpoint_dir) /
                              ("checkpoint_" + std::to_string(n) + ".axbq")).string();
    write_checkpoint(path, s);
    last_checkpoint = path;
  };

  Sample first = measure(initial, integ, opts.record_besov, opts.record_besov_velocity);
  res.series.rows.push_back(first);
  if (opts.on_sample) opts.on_sample(first);
  if (opts.on_state) opts.on_state(initial);
  checkpoint(initial, 0);

  StepDiag prev{first.h1_v, first.linf_grad_v, first.h1_gamma, first.h1_rho};
  double int_v2 = 0.0, int_g2 = 0.0, int_r2 = 0.0, int_linf = 0.0;
  SimState s = initial;
  long n = 0;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  try {
    while (s.t < t_end - eps) {
      StepConfig c = cfg;
      c.dt = std::min(cfg.dt, t_end - s.t);
      SimState next = integ.step(s, c);
      const double dt = next.t - s.t;
      const StepDiag d = step_diag(next, integ);
      int_v2 += 0.5 * dt * (prev.h1_v * prev.h1_v + d.h1_v * d.h1_v);
      int_g2 += 0.5 * dt * (prev.h1_gamma * prev.h1_gamma + d.h1_gamma * d.h1_gamma);
      int_r2 += 0.5 * dt * (prev.h1_rho * prev.h1_rho + d.h1_rho * d.h1_rho);
      int_linf += 0.5 * dt * (prev.linf_grad_v + d.linf_grad_v);
      prev = d;
      s = std::move(next);
      ++n;
      const bool last = !(s.t < t_end - eps);
      if (last) s.t = std::abs(s.t - t_end) <= eps ? t_end : s.t;
      if (n % opts.cadence == 0 || last) {
        Sample m = measure(s, integ, opts.record_besov, opts.record_besov_velocity);
        m.step = n;
        m.dt = dt;
        m.int_grad_v2 = int_v2;
        m.int_grad_gamma2 = int_g2;
        m.int_grad_rho2 = int_r2;
        m.int_linf_grad_v = int_linf;
        res.series.rows.push_back(m);
        if (opts.on_sample) opts.on_sample(m);
        if (opts.on_state) opts.on_state(s);
      }
      if (opts.checkpoint_every > 0 && n % opts.checkpoint_every == 0) checkpoint(s, n);
    }
  } catch (BlowUpError& e) {
    e.set_last_checkpoint(last_checkpoint);
    throw;
  }
  res.final_state = std::move(s);
  res.steps = n;
  return res;
}

ScalarField cellular_stream(const GridSpec& grid, double amplitude) {
  return ScalarField::sample(grid, Parity::odd, [amplitude](double r, double z) {
    return amplitude * r * std::exp(-r * r) * std::sin(0.5 * std::numbers::pi * z);
  });
}

TransportSeries run_transport_diffusion(const ScalarField& rho0, const StreamProvider& psi, double kappa,
                                        const StepConfig& cfg, double t_end, double besov_p, int cadence) {
  require_parity(rho0, Parity::even, "run_transport_diffusion");
  if (!(kappa >= 0.0)) throw Error(ErrorCode::invalid_argument, "run_transport_diffusion: kappa must be >= 0");
  if (cadence < 1) throw Error(ErrorCode::invalid_argument, "run_transport_diffusion: cadence must be >= 1");
  const GridSpec& g = rho0.grid();
  Integrator integ(g, kappa);
  const DyadicPartition* part = integ.partition();
  if (!part) throw Error(ErrorCode::grid_too_coarse, "run_transport_diffusion: grid too coarse for Besov series");

  TransportSeries out;
  out.grid = g;
  out.kappa = kappa;
  out.besov_p = besov_p;

  auto sample = [&](double t, const ScalarField& rho, double int_linf, double int_r2) {
    TransportSample m;
    m.t = t;
    m.besov_rho = besov_norm(rho, 0.0, besov_p, 1.0, *part);
    m.l2_rho = lp_norm(rho, 2.0);
    m.linf_rho = lp_norm(rho, INFINITY);
    m.int_linf_grad_v = int_linf;
    m.int_grad_rho2 = int_r2;
    out.rows.push_back(m);
  };

  SimState s;
  s.t = 0.0;
  s.kappa = kappa;
  s.rho = rho0;
  s.psi = psi(0.0);
  s.v = velocity_from_stream(s.psi);
  double grad_prev = velocity_gradient_norms(s.v).linf;
  double rho_prev = gradient_l2(s.rho);
  double int_linf = 0.0, int_r2 = 0.0;
  sample(0.0, s.rho, 0.0, 0.0);

  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  long n = 0;
  while (s.t < t_end - eps) {
    StepConfig c = cfg;
    c.dt = std::min(cfg.dt, t_end - s.t);
    const double dt = c.cfl_enforce ? cfl_dt(s, c) : c.dt;
    const FaceFluxes f = fluxes_from_stream(s.psi);
    ScalarField rho = advect_impl(s.rho, f, dt, cfg.advection_scheme, cfg.cfl_enforce);
    guard(rho, "rho", s.t + dt);
    rho = integ.diffuse_rho(rho, dt);
    s.rho = std::move(rho);
    s.t += dt;
    s.psi = psi(s.t);
    s.v = velocity_from_stream(s.psi);
    const double grad_now = velocity_gradient_norms(s.v).linf;
    const double rho_now = gradient_l2(s.rho);
    int_linf += 0.5 * dt * (grad_prev + grad_now);
    int_r2 += 0.5 * dt * (rho_prev * rho_prev + rho_now * rho_now);
    grad_prev = grad_now;
    rho_prev = rho_now;
    ++n;
    const bool last = !(s.t < t_end - eps);
    if (n % cadence == 0 || last) sample(s.t, s.rho, int_linf, int_r2);
  }
  return out;
}

void write_checkpoint(const std::string& path, const SimState& s) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "checkpoint: cannot open '" + path + "' for writing");
  const GridSpec& g = s.grid();
  os.write("AXBQ1", 5);
  put_u32(os, static_cast<std::uint32_t>(g.nr));
  put_u32(os, static_cast<std::uint32_t>(g.nz));
  put_f64(os, g.rmax);
  put_f64(os, g.zmin);
  put_f64(os, g.zmax);
  put_f64(os, s.t);
  put_f64(os, s.kappa);
  for (const ScalarField* f : {&s.rho, &s.zeta, &s.v.vr, &s.v.vz})
    for (double v : f->values()) put_f64(os, v);
  if (!os) throw Error(ErrorCode::io_error, "checkpoint: write to '" + path + "' failed");
}

SimState read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "checkpoint: cannot open '" + path + "'");
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "AXBQ1", 5) != 0)
    throw Error(ErrorCode::io_error, "checkpoint: '" + path + "' has no AXBQ1 header");
  const int nr = static_cast<int>(get_u32(is));
  const int nz = static_cast<int>(get_u32(is));
  const double rmax = get_f64(is), zmin = get_f64(is), zmax = get_f64(is);
  const GridSpec g = make_grid(nr, nz, rmax, zmin, zmax);
  SimState s;
  s.t = get_f64(is);
  s.kappa = get_f64(is);
  auto read_field = [&](Parity p) {
    ScalarField f(g, p);
    for (double& v : f.raw()) v = get_f64(is);
    return f;
  };
  s.rho = read_field(Parity::even);
  s.zeta = read_field(Parity::even);
  s.v.vr = read_field(Parity::odd);
  s.v.vz = read_field(Parity::even);
  const StreamSolver solver(g);
  s.psi = solver.solve(multiply_by_r(s.zeta));
  return s;
}

}  // namespace axbq
