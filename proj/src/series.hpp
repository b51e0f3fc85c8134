#pragma once

// Recorded diagnostics of a run. Monitors are pure functions of these.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"

namespace axbq {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sample {
  double t = 0.0;
  long step = 0;
  double dt = 0.0;  // step that produced this sample (0 for the initial row)

  double l1_rho = 0.0;
  double l2_rho = 0.0;
  double l3_rho = 0.0;
  double linf_rho = 0.0;
  double h1_rho = 0.0;  // |grad rho|_{L2}

  double l2_v = 0.0;
  double h1_v = 0.0;  // |grad v|_{L2}
  double linf_grad_v = 0.0;

  double l2_zeta = 0.0;
  double l2_omega = 0.0;
  double l2_gamma = 0.0;  // Gamma for the run's branch
  double h1_gamma = 0.0;
  double l6_vr_over_r = 0.0;

  double besov_b31_0_rho = kNaN;
  double besov_bp1_1p3p_v = kNaN;

  // Running time integrals (trapezoid over every step).
  double int_grad_v2 = 0.0;      // int_0^t |grad v|^2
  double int_grad_gamma2 = 0.0;  // int_0^t |grad Gamma|^2
  double int_grad_rho2 = 0.0;    // int_0^t |grad rho|^2
  double int_linf_grad_v = 0.0;  // int_0^t |grad v|_inf
};

struct TimeSeries {
  GridSpec grid;
  double kappa = 0.0;
  std::string branch;  // "general" or "near_one"
  std::string label;   // free-form, e.g. preset name
  std::vector<Sample> rows;

  bool empty() const { return rows.empty(); }
  const Sample& initial() const { return rows.front(); }
};

struct SampleColumn {
  const char* name;
  double Sample::*member;
};

// Every numeric column except `step`, in CSV order.
std::span<const SampleColumn> sample_columns();
// Throws missing_series for an unknown name.
double Sample::*sample_member(const std::string& name);

// Copy of `series` with `column` multiplied by `factor` on rows with t >= t_from.
TimeSeries splice(const TimeSeries& series, const std::string& column, double t_from, double factor = 2.0);

// Columns of the persisted time-series CSV, in order.
const std::vector<std::string>& timeseries_csv_columns();

// CSV with a header row; numbers at full precision, NaN as an empty cell.
// An empty `columns` writes "step" followed by every sample column.
std::string series_csv(const TimeSeries& s, const std::vector<std::string>& columns = {});

// Reads a CSV written by series_csv. Known columns are filled, missing ones
// keep their defaults; unknown columns throw missing_series.
TimeSeries parse_series_csv(const std::string& text);

}  // namespace axbq
