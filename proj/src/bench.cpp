#include "bench.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "coupling.hpp"
#include "diffops.hpp"
#include "evolve.hpp"
#include "fields.hpp"
#include "lpbesov.hpp"
#include "studies.hpp"

namespace axbq {

namespace fs = std::filesystem;

namespace {

struct Writer {
  fs::path root;
  std::vector<std::string>* files;

  void operator()(const std::string& rel, const std::string& content) const {
    const fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + p.string() + "'");
    files->push_back(rel);
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double x) {
  if (std::isnan(x)) return {};
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

// Local order between consecutive rows; empty for the first row.
std::string local_order(const std::vector<double>& h, const std::vector<double>& e, std::size_t k) {
  if (k == 0 || e[k] <= 0.0 || e[k - 1] <= 0.0) return {};
  return num(std::log(e[k - 1] / e[k]) / std::log(h[k - 1] / h[k]));
}

std::string singell_csv(const EllipticConvergence& c) {
  std::string out = "h,l2_error,order_estimate,ratio_lp\n";
  for (std::size_t k = 0; k < c.h.size(); ++k)
    out += num(c.h[k]) + "," + num(c.error[k]) + "," + local_order(c.h, c.error, k) + "," + num(c.ratio_l2[k]) + "\n";
  return out;
}

// order_estimate is the smaller of the two local orders.
std::string coupling_csv(const IdentityStudy& s) {
  std::string out = "h,residual_lemLD,residual_leme1,order_estimate\n";
  for (std::size_t k = 0; k < s.h.size(); ++k) {
    std::string order;
    if (k > 0) {
      const double a = std::log(s.residual_lemLD[k - 1] / s.residual_lemLD[k]) / std::log(s.h[k - 1] / s.h[k]);
      const double b = std::log(s.residual_leme1[k - 1] / s.residual_leme1[k]) / std::log(s.h[k - 1] / s.h[k]);
      order = num(std::min(a, b));
    }
    out += num(s.h[k]) + "," + num(s.residual_lemLD[k]) + "," + num(s.residual_leme1[k]) + "," + order + "\n";
  }
  return out;
}

bool enabled(const ExperimentConfig& cfg, const std::string& check) {
  for (const auto& m : cfg.monitors.enabled)
    if (m == check) return true;
  return false;
}

std::optional<GridSpec> coarsened(const GridSpec& g) {
  if (g.nr % 2 || g.nz % 2 || g.nr / 2 < 4 || g.nz / 2 < 4) return std::nullopt;
  return GridSpec{g.nr / 2, g.nz / 2, g.rmax, g.zmin, g.zmax};
}

struct JobResult {
  double kappa = 0.0;
  std::string dir;
  std::string branch;
  std::string status = "passed";
  ErrorCode error = ErrorCode::ok;
  std::string message;
  std::string last_checkpoint;
  long steps = 0;
  double t_final = 0.0;
  double seconds = 0.0;
  EstimateReport report;
  std::vector<std::string> files;
  std::vector<std::string> notes;
};

struct BernsteinPair {
  double cmin = kNaN, cmax = kNaN;
};

BernsteinPair bernstein_constants(const ScalarField& rho, const DyadicPartition& part) {
  BernsteinPair b;
  for (int q = 1; q <= part.qmax - 1; ++q) {
    const BernsteinResult r = bernstein_check(rho, q, 2.0, 2.0, part);
    if (r.empty) continue;
    b.cmin = std::isnan(b.cmin) ? r.ratio : std::min(b.cmin, r.ratio);
    b.cmax = std::isnan(b.cmax) ? r.ratio : std::max(b.cmax, r.ratio);
  }
  return b;
}

std::string besov_csv(const TimeSeries& s, const std::vector<BernsteinPair>& bern) {
  std::string out = "t,besov_b31_0_rho,besov_bp1_1p3p_v,bernstein_cmin,bernstein_cmax\n";
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    const BernsteinPair b = k < bern.size() ? bern[k] : BernsteinPair{};
    const Sample& r = s.rows[k];
    out += num(r.t) + "," + num(r.besov_b31_0_rho) + "," + num(r.besov_bp1_1p3p_v) + "," + num(b.cmin) + "," +
           num(b.cmax) + "\n";
  }
  return out;
}

EstimateReport run_monitors(const ExperimentConfig& cfg, double kappa, const SimState& initial,
                            const TimeSeries& series, const TimeSeries* companion, JobResult& job) {
  std::vector<EstimateReport> reports;
  const StepConfig sc = cfg.step_config();
  const Branch branch = branch_for(kappa);

  if (enabled(cfg, "max_principle"))
    for (double p : cfg.monitors.max_principle_p) reports.push_back(check_max_principle(series, p));
  if (enabled(cfg, "energy")) reports.push_back(check_energy(series));
  if (enabled(cfg, "zeta_envelope")) reports.push_back(check_zeta_envelope(series, companion));
  if (enabled(cfg, "gamma_energy")) {
    if (branch == Branch::general)
      reports.push_back(check_gamma_energy(series, companion));
    else
      job.notes.push_back("gamma_energy skipped on the near_one branch");
  }
  if (enabled(cfg, "gamma1_energy")) {
    if (branch == Branch::near_one)
      reports.push_back(check_gamma1_energy(series, kappa, companion));
    else
      job.notes.push_back("gamma1_energy skipped on the general branch");
  }
  if (enabled(cfg, "hls")) reports.push_back(check_hls(series, companion));

  if (enabled(cfg, "log_estimate")) {
    auto transport = [&](const GridSpec& g, const ScalarField& rho0) {
      const ScalarField psi = cellular_stream(g, cfg.monitors.transport_amplitude);
      return run_transport_diffusion(rho0, [psi](double) { return psi; }, kappa, sc, cfg.time.t_end, 3.0,
                                     cfg.time.cadence);
    };
    const TransportSeries ts = transport(initial.grid(), initial.rho);
    std::optional<TransportSeries> tc;
    if (companion) {
      const GridSpec g = companion->grid;
      tc = transport(g, make_initial_state(g, kappa, cfg.init_spec()).rho);
    }
    reports.push_back(check_log_estimate(ts, tc ? &*tc : nullptr));
  }

  if (enabled(cfg, "stability")) {
    const int cadence = std::max(cfg.time.cadence, 10);
    ScalarField dir = RandomSmoothField::draw(cfg.verify.seed).sample(initial.grid());
    dir *= 1.0 / lp_norm(dir, 2.0);
    auto perturbed = [&](double delta) {
      return make_state(initial.t, kappa, initial.rho + delta * dir, initial.zeta);
    };
    const double delta = cfg.monitors.stability_delta;
    const StateRun a = record_states(initial, sc, cfg.time.t_end, cadence);
    const StateRun b = record_states(perturbed(delta), sc, cfg.time.t_end, cadence);
    const StateRun c = record_states(perturbed(delta / 10.0), sc, cfg.time.t_end, cadence);
    const EstimateReport ref = check_stability(a, c);
    reports.push_back(check_stability(a, b, &ref));
  }
  return merge(reports);
}

JobResult run_job(const ExperimentConfig& cfg, double kappa) {
  const auto start = std::chrono::steady_clock::now();
  JobResult job;
  job.kappa = kappa;
  job.dir = kappa_dir(kappa);
  const fs::path root = fs::path(cfg.output.directory) / job.dir;
  const Writer write{fs::path(cfg.output.directory), &job.files};
  try {
    job.branch = to_string(branch_for(kappa));
    const GridSpec grid = make_grid(cfg.grid.nr, cfg.grid.nz, cfg.grid.rmax, cfg.grid.zmin, cfg.grid.zmax);
    const StepConfig sc = cfg.step_config();
    const SimState initial = make_initial_state(grid, kappa, cfg.init_spec());

    std::optional<DyadicPartition> part;
    if (cfg.output.besov_report) {
      try {
        part = build_partition(grid);
      } catch (const Error&) {
        job.notes.push_back("grid too coarse for the Bernstein columns");
      }
    }
    std::vector<BernsteinPair> bern;

    RunOptions opts;
    opts.cadence = cfg.time.cadence;
    opts.record_besov = true;
    opts.record_besov_velocity = cfg.output.besov_report;
    opts.checkpoint_dir = (root / "checkpoints").string();
    opts.checkpoint_every = cfg.output.checkpoint_every;
    opts.label = cfg.init.preset;
    if (part) opts.on_state = [&](const SimState& s) { bern.push_back(bernstein_constants(s.rho, *part)); };

    RunResult res;
    try {
      res = run(initial, sc, cfg.time.t_end, opts);
    } catch (const BlowUpError& e) {
      job.last_checkpoint = e.last_checkpoint();
      throw;
    }
    job.steps = res.steps;
    job.t_final = res.final_state.t;
    write(job.dir + "/series.csv", series_csv(res.series, timeseries_csv_columns()));
    write(job.dir + "/diagnostics.csv", series_csv(res.series));
    if (cfg.output.besov_report) write(job.dir + "/besov.csv", besov_csv(res.series, bern));
    write_checkpoint((root / "final.axbq").string(), res.final_state);
    job.files.push_back(job.dir + "/final.axbq");
    for (const auto& entry : fs::directory_iterator(root / "checkpoints"))
      job.files.push_back(job.dir + "/checkpoints/" + entry.path().filename().string());

    std::optional<TimeSeries> companion;
    if (cfg.monitors.companion) {
      if (const auto cg = coarsened(grid)) {
        RunOptions co;
        co.cadence = cfg.time.cadence;
        co.record_besov = false;
        co.label = cfg.init.preset + " companion";
        companion = run(make_initial_state(*cg, kappa, cfg.init_spec()), sc, cfg.time.t_end, co).series;
        write(job.dir + "/companion.csv", series_csv(*companion));
      } else {
        job.notes.push_back("grid cannot be coarsened; companion skipped");
      }
    }

    job.report = run_monitors(cfg, kappa, initial, res.series, companion ? &*companion : nullptr, job);
    write(job.dir + "/estimates.csv", estimates_csv(job.report));
    write(job.dir + "/verdict.csv", verdict_csv(job.report));
    if (!job.report.all_passed()) job.status = "failed";
  } catch (const Error& e) {
    job.status = "error";
    job.error = e.code();
    job.message = e.what();
  } catch (const std::exception& e) {
    job.status = "error";
    job.error = ErrorCode::internal;
    job.message = e.what();
  }
  job.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return job;
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

class MutationScope {
 public:
  explicit MutationScope(bool on) : previous_(stencil_mutation()) { set_stencil_mutation(on || previous_); }
  ~MutationScope() { set_stencil_mutation(previous_); }
  MutationScope(const MutationScope&) = delete;
  MutationScope& operator=(const MutationScope&) = delete;

 private:
  bool previous_;
};

std::string dat_table(const TimeSeries& s, const std::string& prefix_name = {}, double prefix = 0.0) {
  std::ostringstream out;
  out.precision(10);
  out << "#";
  if (!prefix_name.empty()) out << ' ' << prefix_name;
  for (const auto& c : sample_columns())
    if (std::string(c.name) != "dt") out << ' ' << c.name;
  out << '\n';
  for (const Sample& r : s.rows) {
    bool first = true;
    if (!prefix_name.empty()) {
      out << prefix;
      first = false;
    }
    for (const auto& c : sample_columns()) {
      if (std::string(c.name) == "dt") continue;
      out << (first ? "" : " ") << r.*c.member;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

// Header becomes a comment line; empty cells become "nan".
std::string csv_to_dat(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::string row = header ? "# " : "";
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
      if (k < line.size() && line[k] != ',') continue;
      const std::string cell = line.substr(start, k - start);
      row += (start ? " " : "") + (cell.empty() ? std::string("nan") : cell);
      start = k + 1;
    }
    out += row + "\n";
    header = false;
  }
  return out;
}

}  // namespace

int thread_count() {
  if (const char* env = std::getenv("AXBQ_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 1024L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string kappa_dir(double kappa) { return "kappa_" + format_double(kappa); }

std::string estimates_csv(const EstimateReport& r) {
  std::string out = "t,name,lhs,rhs,pass\n";
  for (const EstimateRow& row : r.rows)
    out += num(row.t) + "," + row.name + "," + num(row.lhs) + "," + num(row.rhs) + "," + (row.pass ? "1" : "0") + "\n";
  return out;
}

CommandResult cmd_run(const ExperimentConfig& cfg, std::ostream* log) {
  validate(cfg);
  CommandResult result;
  const fs::path root(cfg.output.directory);
  fs::create_directories(root);
  const Writer write{root, &result.files};
  write("config.ini", serialize_config(cfg));

  const std::vector<double> kappas = cfg.kappas();
  std::vector<JobResult> jobs(kappas.size());
  std::mutex log_mutex;
  parallel_for(kappas.size(), thread_count(), [&](std::size_t k) {
    jobs[k] = run_job(cfg, kappas[k]);
    if (log) {
      const std::lock_guard<std::mutex> lock(log_mutex);
      *log << jobs[k].dir << ": " << jobs[k].status;
      if (!jobs[k].message.empty()) *log << " (" << jobs[k].message << ")";
      std::ostringstream secs;
      secs.setf(std::ios::fixed);
      secs.precision(1);
      secs << jobs[k].seconds;
      *log << " [" << jobs[k].steps << " steps, " << secs.str() << " s]\n";
    }
  });

  nlohmann::json manifest;
  manifest["config"] = "config.ini";
  manifest["jobs"] = nlohmann::json::array();
  std::string merged = "name,pass_count,fail_count,fitted_constant,tolerance\n";
  for (JobResult& job : jobs) {
    for (auto& f : job.files) result.files.push_back(std::move(f));
    nlohmann::json j{{"kappa", job.kappa},       {"dir", job.dir},         {"branch", job.branch},
                     {"status", job.status},     {"steps", job.steps},     {"t_final", job.t_final},
                     {"seconds", job.seconds},   {"notes", job.notes}};
    if (job.status == "error") {
      j["error"] = to_string(job.error);
      j["message"] = job.message;
      if (!job.last_checkpoint.empty())
        j["last_checkpoint"] = fs::relative(job.last_checkpoint, root).generic_string();
      if (result.error == ErrorCode::ok) {
        result.error = job.error;
        result.error_message = job.dir + ": " + job.message;
      }
    } else {
      j["series"] = job.dir + "/series.csv";
      j["failed_checks"] = nlohmann::json::array();
      for (const auto& c : job.report.checks())
        if (!job.report.passed(c)) j["failed_checks"].push_back(c);
      for (const VerdictLine& v : verdict(job.report)) {
        merged += job.dir + ":" + v.name + "," + std::to_string(v.pass_count) + "," + std::to_string(v.fail_count) +
                  "," + num(v.fitted_constant) + "," + num(v.tolerance) + "\n";
      }
    }
    manifest["jobs"].push_back(j);
  }
  write("verdict.csv", merged);
  write("manifest.json", manifest.dump(2) + "\n");

  const bool any_error = std::any_of(jobs.begin(), jobs.end(), [](const JobResult& j) { return j.status == "error"; });
  const bool any_fail = std::any_of(jobs.begin(), jobs.end(), [](const JobResult& j) { return j.status == "failed"; });
  result.exit_status = any_error ? kExitError : any_fail ? kExitCheckFailed : kExitOk;
  return result;
}

CommandResult cmd_verify(const ExperimentConfig& cfg, std::ostream* log) {
  validate(cfg);
  VerifyOptions opt;
  opt.grid = cfg.grid_spec();
  opt.h0 = cfg.verify.h_coarse;
  opt.levels = cfg.verify.levels;
  opt.random_fields = cfg.verify.random_fields;
  opt.seed = cfg.verify.seed;

  VerifyResult v;
  {
    const MutationScope mutation(cfg.verify.mutation);
    v = run_verify(opt);
  }

  CommandResult result;
  const fs::path root(cfg.output.directory);
  const Writer write{root, &result.files};
  std::string checks = "name,value,threshold,pass,detail\n";
  std::string verdict = "name,pass_count,fail_count,fitted_constant,tolerance\n";
  for (const VerifyCheck& c : v.checks) {
    checks += c.name + "," + num(c.value) + "," + num(c.threshold) + "," + (c.pass ? "1" : "0") + "," + c.detail + "\n";
    verdict += c.name + "," + (c.pass ? "1,0," : "0,1,") + num(c.value) + "," + num(c.threshold) + "\n";
    if (log)
      *log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_double(c.value) << " (threshold "
           << format_double(c.threshold) << ")\n";
  }
  write("verify.csv", checks);
  write("verdict.csv", verdict);
  write("convergence_singell.csv", singell_csv(v.elliptic));
  write("convergence_coupling.csv", coupling_csv(v.identities));
  result.exit_status = v.all_passed() ? kExitOk : kExitCheckFailed;
  return result;
}

CommandResult cmd_convergence(const ExperimentConfig& cfg, std::ostream* log) {
  validate(cfg);
  const std::vector<double> hs = h_ladder(cfg.verify.h_coarse, cfg.verify.levels);
  IdentityStudy ids;
  EllipticConvergence ell;
  {
    const MutationScope mutation(cfg.verify.mutation);
    ids = identity_study(hs);
    ell = elliptic_convergence(hs);
  }
  CommandResult result;
  const Writer write{fs::path(cfg.output.directory), &result.files};
  write("convergence_singell.csv", singell_csv(ell));
  write("convergence_coupling.csv", coupling_csv(ids));
  const bool ok = ids.order_lemLD >= 1.9 && ids.order_leme1 >= 1.9 && ell.order >= 1.9;
  if (log)
    *log << "order lemLD " << format_double(ids.order_lemLD) << ", leme1 " << format_double(ids.order_leme1)
         << ", L " << format_double(ell.order)
         << (ok ? "" : " (below 1.9)") << "\n";
  result.exit_status = ok ? kExitOk : kExitCheckFailed;
  return result;
}

CommandResult cmd_plotdata(const std::string& run_dir, const std::string& out_dir, std::ostream* log) {
  const fs::path root(run_dir);
  if (!fs::is_directory(root)) throw Error(ErrorCode::missing_run, "'" + run_dir + "' is not a directory");
  CommandResult result;
  const Writer write{fs::path(out_dir), &result.files};

  if (fs::exists(root / "manifest.json")) {
    const nlohmann::json manifest = nlohmann::json::parse(read_file(root / "manifest.json"));
    std::string overlay;
    for (const auto& job : manifest.at("jobs")) {
      const std::string dir = job.at("dir").get<std::string>();
      const fs::path diag = root / dir / "diagnostics.csv";
      if (!fs::exists(diag)) continue;
      const TimeSeries s = parse_series_csv(read_file(diag));
      write("series_" + dir + ".dat", dat_table(s));
      const double kappa = job.at("kappa").get<double>();
      overlay += (overlay.empty() ? "" : "\n\n") + std::string("# kappa = ") + num(kappa) + "\n" +
                 dat_table(s, "kappa", kappa);
    }
    if (!overlay.empty()) write("overlay_kappa.dat", overlay);
  }
  for (const char* name : {"convergence_singell", "convergence_coupling"}) {
    const fs::path p = root / (std::string(name) + ".csv");
    if (fs::exists(p)) write(std::string(name) + ".dat", csv_to_dat(read_file(p)));
  }
  if (result.files.empty()) throw Error(ErrorCode::missing_run, "no run or convergence data in '" + run_dir + "'");
  if (log) *log << result.files.size() << " plot files written to " << out_dir << "\n";
  return result;
}

}  // namespace axbq
