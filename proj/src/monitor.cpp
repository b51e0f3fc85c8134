#include "monitor.hpp"

#include <algorithm>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "axisolve.hpp"
#include "coupling.hpp"
#include "errors.hpp"

namespace axbq {

namespace {

void require_rows(const TimeSeries& s, const char* where) {
  if (s.rows.empty()) throw Error(ErrorCode::missing_series, std::string(where) + ": empty series");
}

void require_finite(const TimeSeries& s, double Sample::*m, const char* column, const char* where) {
  for (const auto& row : s.rows)
    if (std::isnan(row.*m))
      throw Error(ErrorCode::missing_series, std::string(where) + ": column " + column + " not recorded");
}

// Smallest C >= 0 with C exp(C t_k) >= y_k for every k.
double fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
  double c = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(y[k])) return kNaN;
    if (y[k] <= 0.0) continue;
    const double ck = t[k] > 0.0 ? boost::math::lambert_w0(y[k] * t[k]) / t[k] : y[k];
    c = std::max(c, ck);
  }
  return c;
}

bool fit_ok(double c) { return std::isfinite(c) && c <= kOverflowGuard; }

void add_refinement(EstimateReport& r, const std::string& family, double c, double c_ref, double band, double t) {
  r.tolerances[family] = 0.0;
  r.fitted_constants[family] = c_ref;
  r.add(t, family, std::abs(c - c_ref), band * std::abs(c_ref));
}

void sort_rows(EstimateReport& r) {
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const EstimateRow& a, const EstimateRow& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.name < b.name;
  });
}

struct Envelope {
  std::vector<double> t, y;
};

// The checked quantity itself must match the companion resolution,
// linearly interpolated to this series' sample times.
void add_agreement(EstimateReport& r, const std::string& family, const Envelope& e, const Envelope& companion) {
  r.tolerances[family] = 0.0;
  const auto& ct = companion.t;
  if (ct.empty()) return;
  std::size_t j = 0;
  for (std::size_t k = 0; k < e.t.size(); ++k) {
    const double t = e.t[k];
    if (t < ct.front() - 1e-9 || t > ct.back() + 1e-9) continue;
    while (j + 1 < ct.size() && ct[j + 1] < t) ++j;
    double y = companion.y[j];
    if (j + 1 < ct.size() && ct[j + 1] > ct[j]) {
      const double w = std::clamp((t - ct[j]) / (ct[j + 1] - ct[j]), 0.0, 1.0);
      y = (1 - w) * companion.y[j] + w * companion.y[j + 1];
    }
    r.add(t, family, std::abs(e.y[k] - y), kRefinementBand * std::abs(y));
  }
}

EstimateReport exponential_check(const std::string& check, const Envelope& e, const Envelope* companion) {
  EstimateReport r;
  const std::string fam = check + ".envelope";
  r.tolerances[fam] = 0.0;
  const double c = fit_exponential(e.t, e.y);
  r.fitted_constants[fam] = c;
  for (std::size_t k = 0; k < e.t.size(); ++k) {
    const double rhs = fit_ok(c) ? c * std::exp(c * e.t[k]) : kNaN;
    // exp rounding can leave the fitted row a few ulps short
    r.add(e.t[k], fam, e.y[k], rhs * (1.0 + 1e-12));
  }
  if (companion) {
    const double cb = fit_exponential(companion->t, companion->y);
    add_refinement(r, check + ".refinement", c, cb, kRefinementBand, e.t.back());
    add_agreement(r, check + ".agreement", e, *companion);
  }
  sort_rows(r);
  return r;
}

Envelope zeta_envelope(const TimeSeries& s) {
  Envelope e;
  for (const auto& row : s.rows) {
    e.t.push_back(row.t);
    e.y.push_back(row.l2_zeta);
  }
  return e;
}

Envelope gamma_envelope(const TimeSeries& s) {
  Envelope e;
  for (const auto& row : s.rows) {
    e.t.push_back(row.t);
    e.y.push_back(row.l2_gamma * row.l2_gamma + row.int_grad_gamma2);
  }
  return e;
}

void require_branch(const TimeSeries& s, const char* branch, ErrorCode code, const char* where) {
  if (!s.branch.empty() && s.branch != branch)
    throw Error(code, std::string(where) + ": series was recorded on the " + s.branch + " branch");
}

struct Gamma1Fit {
  double source = 0.0;  // sup (lhs - G0) / |rho0|^2
  double c = 0.0;       // source / ((kappa-1)^2 kappa^{-1/2})
  double g0 = 0.0;
  double rho0_sq = 0.0;
  double weight = 0.0;  // (kappa-1)^2 kappa^{-1/2} |rho0|^2
};

double gamma1_lhs(const Sample& row) { return row.l2_gamma * row.l2_gamma + row.int_grad_gamma2; }

Gamma1Fit fit_gamma1(const TimeSeries& s, double kappa) {
  Gamma1Fit f;
  f.g0 = gamma1_lhs(s.rows.front());
  f.rho0_sq = s.rows.front().l2_rho * s.rows.front().l2_rho;
  f.weight = (kappa - 1.0) * (kappa - 1.0) / std::sqrt(kappa) * f.rho0_sq;
  double excess = 0.0;
  for (const auto& row : s.rows) {
    const double x = gamma1_lhs(row) - f.g0;
    if (!std::isfinite(x)) excess = kNaN;
    if (std::isfinite(excess)) excess = std::max(excess, x);
  }
  if (f.rho0_sq > 0.0) f.source = excess / f.rho0_sq;
  else f.source = excess > 0.0 ? INFINITY : 0.0;
  if (f.weight > 0.0) f.c = excess / f.weight;
  else f.c = excess > 1e-12 * std::max(1.0, f.g0) ? INFINITY : 0.0;
  return f;
}

struct HlsFit {
  std::vector<double> t, ratio;
  double c = kNaN;
  bool degenerate = false;
};

HlsFit fit_hls(const TimeSeries& s) {
  HlsFit f;
  for (const auto& row : s.rows) {
    if (!(row.l2_zeta >= kDegenerate)) {
      f.degenerate = true;
      continue;
    }
    f.t.push_back(row.t);
    f.ratio.push_back(row.l6_vr_over_r / row.l2_zeta);
  }
  if (!f.ratio.empty()) {
    f.c = 0.0;
    for (double x : f.ratio) f.c = std::isfinite(x) && std::isfinite(f.c) ? std::max(f.c, x) : kNaN;
  }
  return f;
}

double log_fit(const TransportSeries& s) {
  const double b0 = s.rows.front().besov_rho;
  double c = 0.0;
  for (const auto& row : s.rows) {
    const double f = 1.0 + row.int_linf_grad_v;
    if (!std::isfinite(row.besov_rho) || !std::isfinite(f)) return kNaN;
    if (row.besov_rho == 0.0) continue;
    if (b0 == 0.0) return INFINITY;
    c = std::max(c, row.besov_rho / (b0 * f));
  }
  return c;
}

}  // namespace

void EstimateReport::add(double t, const std::string& name, double lhs, double rhs) {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) throw Error(ErrorCode::internal, "EstimateReport: no tolerance for " + name);
  rows.push_back({t, name, lhs, rhs, lhs <= rhs * (1.0 + it->second)});
}

bool EstimateReport::passed(const std::string& check) const {
  for (const auto& row : rows)
    if (!row.pass && check_of(row.name) == check) return false;
  return true;
}

bool EstimateReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const EstimateRow& r) { return r.pass; });
}

std::vector<std::string> EstimateReport::checks() const {
  std::set<std::string> s;
  for (const auto& row : rows) s.insert(check_of(row.name));
  return {s.begin(), s.end()};
}

std::vector<std::string> EstimateReport::families() const {
  std::set<std::string> s;
  for (const auto& row : rows) s.insert(row.name);
  return {s.begin(), s.end()};
}

std::string check_of(const std::string& row_name) { return row_name.substr(0, row_name.find('.')); }

EstimateReport merge(const std::vector<EstimateReport>& reports) {
  EstimateReport out;
  for (const auto& r : reports) {
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    for (const auto& [k, v] : r.fitted_constants) out.fitted_constants[k] = v;
    for (const auto& [k, v] : r.tolerances) out.tolerances[k] = v;
    for (const auto& [k, v] : r.flags) out.flags[k] = v;
  }
  sort_rows(out);
  return out;
}

EstimateReport check_max_principle(const TimeSeries& s, double p) {
  require_rows(s, "check_max_principle");
  double Sample::*m = nullptr;
  std::string fam;
  if (p == 1.0) m = &Sample::l1_rho, fam = "max_principle.L1";
  else if (p == 2.0) m = &Sample::l2_rho, fam = "max_principle.L2";
  else if (p == 3.0) m = &Sample::l3_rho, fam = "max_principle.L3";
  else if (std::isinf(p) && p > 0) m = &Sample::linf_rho, fam = "max_principle.Linf";
  else throw Error(ErrorCode::missing_series, "check_max_principle: no series for p = " + std::to_string(p));
  require_finite(s, m, fam.c_str(), "check_max_principle");
  EstimateReport r;
  r.tolerances[fam] = kMaxPrincipleTol;
  const double ref = s.rows.front().*m;
  for (const auto& row : s.rows) r.add(row.t, fam, row.*m, ref);
  return r;
}

EstimateReport check_energy(const TimeSeries& s) {
  require_rows(s, "check_energy");
  EstimateReport r;
  const std::string der = "energy.derivative", env = "energy.envelope", lin = "energy.linear";
  r.tolerances[der] = kEnergyTol;
  r.tolerances[env] = kEnergyTol;
  r.tolerances[lin] = kEnergyTol;
  const auto& rows = s.rows;
  const double v0 = rows.front().l2_v, r0 = rows.front().l2_rho;
  for (const auto& row : rows) {
    const double t = row.t;
    r.add(t, env, 0.5 * row.l2_v * row.l2_v + row.int_grad_v2, 0.5 * v0 * v0 + (v0 + t * r0) * r0 * t);
    r.add(t, lin, row.l2_v, v0 + t * r0);
  }
  // (1/2) d/dt |v|^2 + |grad v|^2 <= |v| |rho|. A difference quotient is
  // the mean of the derivative over its window, so it is compared with the
  // window extremes: dE + min |grad v|^2 <= max |v||rho| + tol * max |grad v|^2.
  // Centered inside, one-sided at the ends.
  const std::size_t n = rows.size();
  auto energy = [&rows](std::size_t k) { return 0.5 * rows[k].l2_v * rows[k].l2_v; };
  if (n >= 2) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t a = k == 0 ? 0 : k - 1, b = k + 1 == n ? k : k + 1;
      const double dE = (energy(b) - energy(a)) / (rows[b].t - rows[a].t);
      double diss_min = INFINITY, diss_max = 0.0, work_max = 0.0;
      for (std::size_t i = a; i <= b; ++i) {
        const double d = rows[i].h1_v * rows[i].h1_v;
        diss_min = std::min(diss_min, d);
        diss_max = std::max(diss_max, d);
        work_max = std::max(work_max, rows[i].l2_v * rows[i].l2_rho);
      }
      r.add(rows[k].t, der, dE + diss_min, work_max + kEnergyTol * diss_max);
    }
  }
  return r;
}

EstimateReport check_zeta_envelope(const TimeSeries& s, const TimeSeries* companion) {
  require_rows(s, "check_zeta_envelope");
  require_finite(s, &Sample::l2_zeta, "l2_zeta", "check_zeta_envelope");
  std::optional<Envelope> ce;
  if (companion) {
    require_rows(*companion, "check_zeta_envelope");
    ce = zeta_envelope(*companion);
  }
  EstimateReport r = exponential_check("zeta_envelope", zeta_envelope(s), ce ? &*ce : nullptr);
  const bool ns_limit =
      std::all_of(s.rows.begin(), s.rows.end(), [](const Sample& x) { return x.l2_rho == 0.0; });
  if (ns_limit) {
    const std::string mono = "zeta_envelope.monotone";
    r.tolerances[mono] = kMonotoneTol;
    for (std::size_t k = 1; k < s.rows.size(); ++k) r.add(s.rows[k].t, mono, s.rows[k].l2_zeta, s.rows[k - 1].l2_zeta);
  }
  sort_rows(r);
  return r;
}

EstimateReport check_gamma_energy(const TimeSeries& s, const TimeSeries* companion) {
  require_rows(s, "check_gamma_energy");
  require_branch(s, "general", ErrorCode::near_one_branch, "check_gamma_energy");
  std::optional<Envelope> ce;
  if (companion) {
    require_rows(*companion, "check_gamma_energy");
    require_branch(*companion, "general", ErrorCode::near_one_branch, "check_gamma_energy");
    ce = gamma_envelope(*companion);
  }
  return exponential_check("gamma_energy", gamma_envelope(s), ce ? &*ce : nullptr);
}

EstimateReport check_gamma1_energy(const TimeSeries& s, double kappa, const TimeSeries* companion) {
  if (branch_for(kappa) != Branch::near_one)
    throw Error(ErrorCode::wrong_branch, "check_gamma1_energy: kappa = " + std::to_string(kappa) +
                                             " lies on the general branch");
  require_rows(s, "check_gamma1_energy");
  require_branch(s, "near_one", ErrorCode::wrong_branch, "check_gamma1_energy");
  if (s.kappa != kappa && !s.branch.empty())
    throw Error(ErrorCode::config_mismatch, "check_gamma1_energy: series kappa differs");
  const Gamma1Fit f = fit_gamma1(s, kappa);
  EstimateReport r;
  const std::string fam = "gamma1_energy.envelope";
  r.tolerances[fam] = 0.0;
  r.fitted_constants[fam] = f.c;
  r.fitted_constants["gamma1_energy.C"] = f.c;
  r.fitted_constants["gamma1_energy.source"] = f.source;
  const double floor = 1e-12 * (f.rho0_sq + f.g0);
  for (const auto& row : s.rows) {
    const double rhs = fit_ok(f.c) ? f.c * f.weight + f.g0 + floor : kNaN;
    r.add(row.t, fam, gamma1_lhs(row), rhs * (1.0 + 1e-12));
  }
  if (companion) {
    require_rows(*companion, "check_gamma1_energy");
    const Gamma1Fit fb = fit_gamma1(*companion, kappa);
    add_refinement(r, "gamma1_energy.refinement", f.c, fb.c, kRefinementBand, s.rows.back().t);
  }
  sort_rows(r);
  return r;
}

EstimateReport check_hls(const TimeSeries& s, const TimeSeries* companion) {
  require_rows(s, "check_hls");
  const HlsFit f = fit_hls(s);
  EstimateReport r;
  const std::string fam = "hls.ratio";
  r.tolerances[fam] = 0.0;
  r.fitted_constants[fam] = f.c;
  if (f.degenerate) r.flags["hls"] = "degenerate";
  for (std::size_t k = 0; k < f.t.size(); ++k) r.add(f.t[k], fam, f.ratio[k], fit_ok(f.c) ? f.c : kNaN);
  if (companion) {
    require_rows(*companion, "check_hls");
    const HlsFit fb = fit_hls(*companion);
    if (std::isfinite(fb.c) || std::isfinite(f.c))
      add_refinement(r, "hls.refinement", f.c, fb.c, kHlsBand, s.rows.back().t);
  }
  return r;
}

EstimateReport check_log_estimate(const TransportSeries& s, const TransportSeries* companion) {
  if (s.rows.empty()) throw Error(ErrorCode::missing_series, "check_log_estimate: empty series");
  for (const auto& row : s.rows)
    if (std::isnan(row.besov_rho)) throw Error(ErrorCode::missing_series, "check_log_estimate: Besov series missing");
  const double c = log_fit(s);
  const double b0 = s.rows.front().besov_rho;
  EstimateReport r;
  const std::string fam = "log_estimate.envelope", growth = "log_estimate.growth";
  r.tolerances[fam] = 0.0;
  r.tolerances[growth] = 0.0;
  r.fitted_constants[fam] = c;
  for (const auto& row : s.rows)
    r.add(row.t, fam, row.besov_rho, fit_ok(c) ? c * b0 * (1.0 + row.int_linf_grad_v) * (1.0 + 1e-12) : kNaN);
  // Linear amplification: B / (1 + int |grad v|_inf) does not keep growing
  // over the second half of the run.
  const double t_end = s.rows.back().t, t_half = 0.5 * (s.rows.front().t + t_end);
  double early = 0.0, late = 0.0;
  for (const auto& row : s.rows) {
    const double g = row.besov_rho / (1.0 + row.int_linf_grad_v);
    (row.t <= t_half ? early : late) = std::max(row.t <= t_half ? early : late, g);
  }
  r.add(t_end, growth, late, 2.0 * early);
  double slope = 0.0;
  for (const auto& row : s.rows)
    if (row.int_linf_grad_v > 0.0 && b0 > 0.0) slope = std::max(slope, (row.besov_rho / b0 - 1.0) / row.int_linf_grad_v);
  r.fitted_constants["log_estimate.slope"] = slope;
  if (companion) {
    if (companion->rows.empty()) throw Error(ErrorCode::missing_series, "check_log_estimate: empty companion");
    add_refinement(r, "log_estimate.refinement", c, log_fit(*companion), kRefinementBand, t_end);
    auto besov = [](const TransportSeries& x) {
      Envelope e;
      for (const auto& row : x.rows) {
        e.t.push_back(row.t);
        e.y.push_back(row.besov_rho);
      }
      return e;
    };
    add_agreement(r, "log_estimate.agreement", besov(s), besov(*companion));
  }
  sort_rows(r);
  return r;
}

TransportSeries splice(const TransportSeries& s, const std::string& column, double t_from, double factor) {
  double TransportSample::*m = nullptr;
  if (column == "besov_rho") m = &TransportSample::besov_rho;
  else if (column == "l2_rho") m = &TransportSample::l2_rho;
  else if (column == "linf_rho") m = &TransportSample::linf_rho;
  else if (column == "int_linf_grad_v") m = &TransportSample::int_linf_grad_v;
  else if (column == "int_grad_rho2") m = &TransportSample::int_grad_rho2;
  else throw Error(ErrorCode::missing_series, "unknown transport column '" + column + "'");
  TransportSeries out = s;
  for (auto& row : out.rows)
    if (row.t >= t_from) row.*m *= factor;
  return out;
}

StateRun record_states(const SimState& initial, const StepConfig& cfg, double t_end, int cadence) {
  StateRun out;
  out.cfg = cfg;
  RunOptions opts;
  opts.cadence = cadence;
  opts.record_besov = false;
  opts.on_state = [&out](const SimState& s) { out.snapshots.push_back(s); };
  run(initial, cfg, t_end, opts);
  return out;
}

double hdot_minus1_norm(const ScalarField& g) {
  const AxisymSolver poisson(g.parity() == Parity::even ? laplacian_stencil(g.grid()) : stream_stencil(g.grid()), 0.0,
                             -1.0);
  const ScalarField u = poisson.solve(g).x;
  return std::sqrt(std::max(0.0, inner(g, u)));
}

double h1_norm(const VelocityRZ& v) {
  const double a = l2_norm(v), b = velocity_gradient_norms(v).l2;
  return std::sqrt(a * a + b * b);
}

EstimateReport check_stability(const StateRun& a, const StateRun& b, const EstimateReport* reference,
                               double reference_factor) {
  auto mismatch = [](const std::string& what) {
    return Error(ErrorCode::config_mismatch, "check_stability: runs differ in " + what);
  };
  if (a.snapshots.empty() || b.snapshots.empty())
    throw Error(ErrorCode::missing_series, "check_stability: empty run");
  if (a.cfg.dt != b.cfg.dt || a.cfg.cfl_max != b.cfg.cfl_max || a.cfg.advection_scheme != b.cfg.advection_scheme ||
      a.cfg.cfl_enforce != b.cfg.cfl_enforce || a.cfg.formulation != b.cfg.formulation)
    throw mismatch("step configuration");
  if (!(a.snapshots.front().grid() == b.snapshots.front().grid())) throw mismatch("grid");
  if (a.snapshots.front().kappa != b.snapshots.front().kappa) throw mismatch("kappa");
  if (a.snapshots.size() != b.snapshots.size()) throw mismatch("number of samples");
  for (std::size_t k = 0; k < a.snapshots.size(); ++k)
    if (std::abs(a.snapshots[k].t - b.snapshots[k].t) > 1e-9 * std::max(1.0, std::abs(a.snapshots[k].t)))
      throw mismatch("sample times (CFL-limited steps diverged)");

  const SimState& a0 = a.snapshots.front();
  const SimState& b0 = b.snapshots.front();
  const double drho0 = lp_norm(a0.rho - b0.rho, 2.0);
  const VelocityRZ dv0{a0.v.vr - b0.v.vr, a0.v.vz - b0.v.vz};
  const double dvel0 = l2_norm(dv0);
  const double delta0 = std::hypot(drho0, dvel0);

  std::vector<double> t, dv, drho;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const SimState& x = a.snapshots[k];
    const SimState& y = b.snapshots[k];
    t.push_back(x.t);
    dv.push_back(h1_norm(VelocityRZ{x.v.vr - y.v.vr, x.v.vz - y.v.vz}));
    drho.push_back(hdot_minus1_norm(x.rho - y.rho));
  }
  auto sup_over = [&](const std::vector<double>& d) {
    double m = 0.0;
    for (double x : d) m = std::isfinite(x) && std::isfinite(m) ? std::max(m, x) : kNaN;
    if (!std::isfinite(m)) return kNaN;
    if (delta0 == 0.0) return m == 0.0 ? 0.0 : INFINITY;
    return m / delta0;
  };

  EstimateReport r;
  r.fitted_constants["stability.delta0"] = delta0;
  const std::pair<std::string, const std::vector<double>*> fams[] = {{"stability.dv", &dv},
                                                                      {"stability.drho", &drho}};
  for (const auto& [fam, d] : fams) {
    const double c = sup_over(*d);
    r.tolerances[fam] = 0.0;
    r.fitted_constants[fam] = c;
    for (std::size_t k = 0; k < t.size(); ++k)
      r.add(t[k], fam, (*d)[k], fit_ok(c) ? c * delta0 * (1.0 + 1e-12) : kNaN);
    if (reference) {
      const auto it = reference->fitted_constants.find(fam);
      if (it == reference->fitted_constants.end())
        throw Error(ErrorCode::missing_series, "check_stability: reference lacks " + fam);
      const double lo = std::min(c, it->second), hi = std::max(c, it->second);
      const std::string lf = fam + ".linearity";
      r.tolerances[lf] = 0.0;
      r.fitted_constants[lf] = it->second;
      const double ratio = hi == 0.0 ? 1.0 : (lo > 0.0 ? hi / lo : INFINITY);
      r.add(t.back(), lf, ratio, reference_factor);
    }
  }
  sort_rows(r);
  return r;
}

StateRun splice(const StateRun& a, const StateRun& b, double t_from, double factor) {
  if (a.snapshots.size() != b.snapshots.size())
    throw Error(ErrorCode::config_mismatch, "splice: runs have different sample counts");
  StateRun out = b;
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
    SimState& y = out.snapshots[k];
    if (y.t < t_from) continue;
    const SimState& x = a.snapshots[k];
    y.rho = axpby(1.0 - factor, x.rho, factor, y.rho);
    y.zeta = axpby(1.0 - factor, x.zeta, factor, y.zeta);
    y.v.vr = axpby(1.0 - factor, x.v.vr, factor, y.v.vr);
    y.v.vz = axpby(1.0 - factor, x.v.vz, factor, y.v.vz);
  }
  return out;
}

std::vector<VerdictLine> verdict(const EstimateReport& r) {
  std::vector<VerdictLine> out;
  for (const auto& fam : r.families()) {
    VerdictLine v;
    v.name = fam;
    for (const auto& row : r.rows)
      if (row.name == fam) (row.pass ? v.pass_count : v.fail_count)++;
    if (auto it = r.fitted_constants.find(fam); it != r.fitted_constants.end()) v.fitted_constant = it->second;
    if (auto it = r.tolerances.find(fam); it != r.tolerances.end()) v.tolerance = it->second;
    out.push_back(v);
  }
  return out;
}

std::string verdict_csv(const EstimateReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "name,pass_count,fail_count,fitted_constant,tolerance\n";
  for (const auto& v : verdict(r)) {
    os << v.name << ',' << v.pass_count << ',' << v.fail_count << ',';
    if (std::isfinite(v.fitted_constant)) os << v.fitted_constant;
    else if (!std::isnan(v.fitted_constant)) os << (v.fitted_constant > 0 ? "inf" : "-inf");
    os << ',' << v.tolerance << '\n';
  }
  return os.str();
}

}  // namespace axbq
