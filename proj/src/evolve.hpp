#pragma once

// Semi-implicit time stepping for the axisymmetric Boussinesq system in the
// (rho, zeta) variables:
//
//   d_t rho  + v . grad rho  = kappa Delta rho
//   d_t zeta + v . grad zeta = (Delta + (2/r) d_r) zeta - (d_r rho) / r
//
// with omega_theta = r zeta and v recovered from omega_theta each step.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "axisolve.hpp"
#include "diffops.hpp"
#include "grid.hpp"
#include "lpbesov.hpp"
#include "series.hpp"

namespace axbq {

struct SimState {
  double t = 0.0;
  double kappa = 0.0;
  ScalarField rho;   // even
  ScalarField zeta;  // even
  VelocityRZ v;      // v^r odd, v^z even
  ScalarField psi;   // azimuthal stream function (odd); not persisted

  const GridSpec& grid() const { return rho.grid(); }
};

enum class AdvectionScheme { upwind2, centered_rk2 };
enum class Formulation { zeta, omega };

const char* to_string(AdvectionScheme s);
AdvectionScheme parse_advection_scheme(const std::string& s);

struct StepConfig {
  double dt = 1e-2;
  double cfl_max = 0.5;
  AdvectionScheme advection_scheme = AdvectionScheme::upwind2;
  // When false the CFL reduction of dt is skipped (used to exercise the
  // blow-up guard).
  bool cfl_enforce = true;
  Formulation formulation = Formulation::zeta;
};

inline constexpr double kOverflowGuard = 1e8;

// Builds a consistent state: psi and v are recovered from r * zeta.
SimState make_state(double t, double kappa, ScalarField rho, ScalarField zeta);

// Recomputes psi and v from zeta.
void refresh_velocity(SimState& s);

struct InitSpec {
  std::string preset = "gaussian";
  double rho_amplitude = 1.0;
  double rho_width = 1.0;
  double rho_center = 0.0;
  double zeta_amplitude = 1.0;
  double zeta_width = 1.0;
  double zeta_center = 0.0;
};

// Known presets:
//   zero                  rho = zeta = 0
//   gaussian              rho = A exp(-(r^2 + (z-c)^2)/s^2), zeta = 0
//   vortex_ring           rho = 0, zeta = B exp(-(r^2 + (z-c)^2)/w^2)   (Navier-Stokes limit)
//   gaussian_vortex_ring  both of the above
//   aligned               gaussian rho and zeta = rho / 2
const std::vector<std::string>& preset_names();
SimState make_initial_state(const GridSpec& grid, double kappa, const InitSpec& init);

// Discrete velocity used by the advection step: volumetric face fluxes
// from the Stokes stream function r psi evaluated at cell corners. The
// discrete divergence of these fluxes vanishes identically.
struct FaceFluxes {
  GridSpec grid;
  std::vector<double> fr;  // (nr + 1) x nz, face a at r = a dr
  std::vector<double> fz;  // nr x (nz + 1), face b at z = zmin + b dz
  double fr_at(int a, int j) const { return fr[static_cast<std::size_t>(a) * grid.nz + j]; }
  double fz_at(int i, int b) const { return fz[static_cast<std::size_t>(i) * (grid.nz + 1) + b]; }
};

FaceFluxes fluxes_from_stream(const ScalarField& psi);

// Largest outflow Courant number dt * (sum of outgoing fluxes) / volume.
double outflow_courant(const FaceFluxes& f, double dt);

// Explicit advection of q over time dt (sub-cycled so each substep has an
// outflow Courant number <= 0.5).
ScalarField advect(const ScalarField& q, const FaceFluxes& f, double dt, AdvectionScheme scheme);

// dt reduced so that dt * max|v| / min(dr, dz) <= cfl_max.
double cfl_dt(const SimState& s, const StepConfig& cfg);

// Holds factorizations reused across steps; cheap to construct.
class Integrator {
 public:
  Integrator(const GridSpec& grid, double kappa);

  SimState step(const SimState& s, const StepConfig& cfg);
  // One step of length exactly dt (no CFL reduction).
  SimState step_exact(const SimState& s, double dt, const StepConfig& cfg);

  // Gamma for the branch selected by kappa.
  ScalarField gamma(const SimState& s);
  ScalarField apply_L(const ScalarField& rho);
  // Implicit diffusion (I - dt kappa Delta)^{-1} rho; identity when kappa = 0.
  ScalarField diffuse_rho(const ScalarField& rho, double dt);
  // Built on first use; null when the grid is too coarse for a partition.
  const DyadicPartition* partition();

  const GridSpec& grid() const { return grid_; }
  double kappa() const { return kappa_; }

 private:
  const AxisymSolver& rho_solver(double dt);
  const AxisymSolver& zeta_solver(double dt);
  const AxisymSolver& omega_solver(double dt);

  SimState step_zeta(const SimState& s, double dt, const StepConfig& cfg);
  SimState step_omega(const SimState& s, double dt, const StepConfig& cfg);

  GridSpec grid_;
  double kappa_;
  StreamSolver stream_;
  AxisymSolver l_solver_;
  std::map<double, AxisymSolver> rho_cache_, zeta_cache_, omega_cache_;
  std::shared_ptr<DyadicPartition> partition_;
  bool partition_tried_ = false;
};

SimState step(const SimState& s, const StepConfig& cfg);

struct RunOptions {
  int cadence = 1;                  // record every `cadence` steps (and the final step)
  bool record_besov = true;         // B^0_{3,1} of rho at each sample
  bool record_besov_velocity = false;
  std::string checkpoint_dir;       // empty: no checkpoints
  int checkpoint_every = 0;         // steps between checkpoints (0: only initial)
  std::string label;
  std::function<void(const Sample&)> on_sample;
  std::function<void(const SimState&)> on_state;  // called alongside on_sample
};

struct RunResult {
  SimState final_state;
  TimeSeries series;
  long steps = 0;
};

// Throws BlowUpError (carrying the last checkpoint path, if any) when a
// monitored norm exceeds kOverflowGuard or becomes non-finite.
RunResult run(const SimState& initial, const StepConfig& cfg, double t_end, const RunOptions& opts = {});

// Time-dependent prescribed stream function psi(t) (odd in r).
using StreamProvider = std::function<ScalarField(double t)>;

// Cellular flow psi = A r exp(-r^2) sin(pi z / 2) used by the transport
// runs; it vanishes on the z faces of [0, 4] x [-4, 4].
ScalarField cellular_stream(const GridSpec& grid, double amplitude);

struct TransportSample {
  double t = 0.0;
  double besov_rho = 0.0;      // |rho|_{B^0_{p,1}}
  double l2_rho = 0.0;
  double linf_rho = 0.0;
  double int_linf_grad_v = 0.0;
  double int_grad_rho2 = 0.0;  // int_0^t |grad rho|^2
};

struct TransportSeries {
  GridSpec grid;
  double kappa = 0.0;
  double besov_p = 3.0;
  std::vector<TransportSample> rows;
};

// Evolves rho alone under a prescribed divergence-free flow.
TransportSeries run_transport_diffusion(const ScalarField& rho0, const StreamProvider& psi, double kappa,
                                        const StepConfig& cfg, double t_end, double besov_p = 3.0,
                                        int cadence = 1);

// Checkpoint I/O: "AXBQ1", u32 nr, u32 nz, f64 rmax, zmin, zmax, t, kappa,
// then rho, zeta, vr, vz row-major, all little-endian.
void write_checkpoint(const std::string& path, const SimState& s);
SimState read_checkpoint(const std::string& path);

// Diagnostics of a single state (integrals left at zero).
Sample measure(const SimState& s, Integrator& integ, bool with_besov, bool with_besov_velocity);

}  // namespace axbq
