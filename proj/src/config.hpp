#pragma once

// Experiment configuration: a sectioned key-value text format.
//
//   # comment          ; comment
//   [section]
//   key = value
//   section.key = value    (accepted anywhere; overrides the current section)
//
// Values are numbers (including "inf"), booleans (true/false), bare or
// double-quoted strings, and comma-separated lists. Unknown keys, duplicate
// keys and malformed values are errors.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evolve.hpp"
#include "grid.hpp"

namespace axbq {

struct ExperimentConfig {
  struct Grid {
    int nr = 128;
    int nz = 256;
    double rmax = 4.0;
    double zmin = -4.0;
    double zmax = 4.0;
    bool operator==(const Grid&) const = default;
  } grid;

  struct Physics {
    std::optional<double> kappa;  // overrides the sweep when set
    std::vector<double> kappa_sweep{0.0, 0.1, 0.5, 0.9, 1.0, 2.0};
    bool operator==(const Physics&) const = default;
  } physics;

  struct Time {
    double dt = 0.01;
    double t_end = 1.0;
    int cadence = 1;
    double cfl_max = 0.5;
    bool cfl_enforce = true;
    std::string advection = "upwind2";
    bool operator==(const Time&) const = default;
  } time;

  struct Init {
    std::string preset = "gaussian_vortex_ring";
    double rho_amplitude = 1.0;
    double rho_width = 1.0;
    double rho_center = 0.0;
    double zeta_amplitude = 1.0;
    double zeta_width = 1.0;
    double zeta_center = 0.0;
    bool operator==(const Init&) const = default;
  } init;

  struct Monitors {
    std::vector<std::string> enabled{"max_principle", "energy", "zeta_envelope", "gamma_energy", "gamma1_energy", "hls"};
    std::vector<double> max_principle_p{2.0, INFINITY};
    bool companion = true;          // coarser run for refinement rows
    double transport_amplitude = 2.0;  // cellular flow of log_estimate
    double stability_delta = 1e-3;  // perturbation size of the stability check
    bool operator==(const Monitors&) const = default;
  } monitors;

  struct Output {
    std::string directory = "axbq_out";
    int checkpoint_every = 0;  // steps; 0 writes only the initial and final states
    bool besov_report = true;
    bool operator==(const Output&) const = default;
  } output;

  struct Verify {
    std::uint64_t seed = 1;
    int random_fields = 20;
    double h_coarse = 0.0625;
    int levels = 3;
    bool mutation = false;
    bool operator==(const Verify&) const = default;
  } verify;

  bool operator==(const ExperimentConfig&) const = default;

  std::vector<double> kappas() const;
  GridSpec grid_spec() const;  // unchecked; make_grid validates dimensions
  StepConfig step_config() const;
  InitSpec init_spec() const;
};

// Check names accepted in monitors.enabled.
const std::vector<std::string>& monitor_names();

// Throws ParseError (line, column) or Error(validation_error) naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical text: every key, one section per group, fixed order.
std::string serialize_config(const ExperimentConfig& c);

// Dotted-key access, e.g. set_config_value(c, "physics.kappa", "0.5").
// The result is validated; on error `c` is unchanged.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& c, const std::string& key);
std::vector<std::string> config_keys();

// Throws Error(validation_error) naming the offending key.
void validate(const ExperimentConfig& c);

// Shortest decimal text that reads back to the same double ("inf" for infinity).
std::string format_double(double x);

}  // namespace axbq
