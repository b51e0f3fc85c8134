#pragma once

// Estimate checks evaluated on recorded series. Every check is a pure
// function of its inputs; rows are ordered by (t, name).
//
// Row names are "<check>.<family>"; the check name is the part before the
// first dot. A row passes iff lhs <= rhs * (1 + tolerances[name]).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evolve.hpp"
#include "series.hpp"

namespace axbq {

struct EstimateRow {
  double t = 0.0;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  std::map<std::string, double> fitted_constants;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> flags;  // e.g. "hls" -> "degenerate"

  // Appends a row; the tolerance for `name` must already be set.
  void add(double t, const std::string& name, double lhs, double rhs);

  bool passed(const std::string& check) const;  // false if any row of the check fails
  bool all_passed() const;
  std::vector<std::string> checks() const;      // distinct check names, sorted
  std::vector<std::string> families() const;    // distinct row names, sorted
};

// Deterministic merge ordered by (t, name); later reports win on key clashes.
EstimateReport merge(const std::vector<EstimateReport>& reports);

std::string check_of(const std::string& row_name);

inline constexpr double kMaxPrincipleTol = 0.01;
inline constexpr double kEnergyTol = 0.05;
inline constexpr double kMonotoneTol = 1e-3;
inline constexpr double kRefinementBand = 0.20;
inline constexpr double kHlsBand = 0.10;
inline constexpr double kDegenerate = 1e-14;

// p in {1, 2, 3, inf}.
EstimateReport check_max_principle(const TimeSeries& s, double p);

// energy.derivative, energy.envelope, energy.linear
EstimateReport check_energy(const TimeSeries& s);

// Smallest C0 with |zeta(t)| <= C0 exp(C0 t); adds zeta_envelope.monotone
// rows when rho is identically zero.
//
// Fitted checks given a companion series at another resolution add
// <check>.refinement (fitted constants within the band) and, except for
// hls, <check>.agreement (the checked quantity within kRefinementBand).
EstimateReport check_zeta_envelope(const TimeSeries& s, const TimeSeries* companion = nullptr);

// Gronwall envelope |Gamma|^2 + int |grad Gamma|^2 <= C0 exp(C0 t).
// Throws near_one_branch for a near-one series.
EstimateReport check_gamma_energy(const TimeSeries& s, const TimeSeries* companion = nullptr);

// |Gamma_1|^2 + int |grad Gamma_1|^2 <= C (kappa-1)^2 kappa^{-1/2} |rho0|^2 + |Gamma_1(0)|^2.
// Records gamma1_energy.C and gamma1_energy.source = sup (lhs - |Gamma_1(0)|^2) / |rho0|^2.
// Throws wrong_branch unless branch_for(kappa) is near_one.
EstimateReport check_gamma1_energy(const TimeSeries& s, double kappa, const TimeSeries* companion = nullptr);

// Ratio |v^r/r|_{L6} / |zeta|_{L2} against its supremum.
EstimateReport check_hls(const TimeSeries& s, const TimeSeries* companion = nullptr);

// B(t) <= C B(0) (1 + int |grad v|_inf), plus the linear-growth row.
EstimateReport check_log_estimate(const TransportSeries& s, const TransportSeries* companion = nullptr);

TransportSeries splice(const TransportSeries& s, const std::string& column, double t_from, double factor = 2.0);

// Snapshots of one run for the stability check.
struct StateRun {
  StepConfig cfg;
  std::vector<SimState> snapshots;
};

StateRun record_states(const SimState& initial, const StepConfig& cfg, double t_end, int cadence);

// |g|_{H^{-1}}^2 = <g, (-Delta)^{-1} g> with the Dirichlet Laplacian.
double hdot_minus1_norm(const ScalarField& g);
// sqrt(|v|^2 + |grad v|^2)
double h1_norm(const VelocityRZ& v);

// Distances between two runs started delta0 apart. Fits C = sup / delta0
// for stability.dv (H1 of delta v) and stability.drho (H^{-1} of delta rho).
// With a reference report (another perturbation size or resolution) the
// fitted constants must agree within a factor `reference_factor`.
EstimateReport check_stability(const StateRun& a, const StateRun& b, const EstimateReport* reference = nullptr,
                               double reference_factor = 2.0);

// Run b with its distance to run a multiplied by `factor` from t_from on.
StateRun splice(const StateRun& a, const StateRun& b, double t_from, double factor = 2.0);

struct VerdictLine {
  std::string name;
  int pass_count = 0;
  int fail_count = 0;
  double fitted_constant = kNaN;
  double tolerance = 0.0;
};

// One line per row family.
std::vector<VerdictLine> verdict(const EstimateReport& r);
std::string verdict_csv(const EstimateReport& r);

}  // namespace axbq
