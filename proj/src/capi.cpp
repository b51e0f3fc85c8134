#include "axbq/axbq.h"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <ostream>
#include <streambuf>
#include <string>

#include "bench.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "evolve.hpp"

struct axbq_config {
  axbq::ExperimentConfig cfg;
};

struct axbq_state {
  axbq::SimState state;
};

namespace {

thread_local std::string g_last_error;

int fail(axbq::ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<int>(code);
}

// Runs fn, mapping exceptions to status codes.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return AXBQ_OK;
  } catch (const axbq::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(axbq::ErrorCode::internal, "out of memory");
  } catch (const std::exception& e) {
    return fail(axbq::ErrorCode::internal, e.what());
  } catch (...) {
    return fail(axbq::ErrorCode::internal, "unknown exception");
  }
}

int null_argument(const char* what) { return fail(axbq::ErrorCode::invalid_argument, std::string(what) + " is NULL"); }

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Forwards complete lines to a callback.
class CallbackBuf : public std::streambuf {
 public:
  CallbackBuf(axbq_log_fn fn, void* user) : fn_(fn), user_(user) {}
  ~CallbackBuf() override { flush_line(); }

 protected:
  int_type overflow(int_type ch) override {
    if (ch == traits_type::eof()) return traits_type::not_eof(ch);
    const std::lock_guard<std::mutex> lock(mutex_);
    if (ch == '\n')
      emit();
    else
      line_ += static_cast<char>(ch);
    return ch;
  }

 private:
  void emit() {
    if (fn_) fn_(line_.c_str(), user_);
    line_.clear();
  }
  void flush_line() {
    if (!line_.empty()) emit();
  }

  axbq_log_fn fn_;
  void* user_;
  std::string line_;
  std::mutex mutex_;
};

template <class Command>
int run_command(axbq_log_fn log, void* user, int* exit_status, Command&& command) {
  if (exit_status) *exit_status = AXBQ_EXIT_ERROR;
  CallbackBuf buf(log, user);
  std::ostream stream(&buf);
  return guarded([&] {
    const axbq::CommandResult r = command(log ? &stream : nullptr);
    if (exit_status) *exit_status = r.exit_status;
    if (r.error != axbq::ErrorCode::ok) {
      if (exit_status) *exit_status = AXBQ_EXIT_ERROR;
      throw axbq::Error(r.error, r.error_message);
    }
  });
}

}  // namespace

extern "C" {

const char* axbq_version(void) { return "0.1.0"; }

const char* axbq_last_error(void) { return g_last_error.c_str(); }

const char* axbq_status_string(int status) { return axbq::to_string(static_cast<axbq::ErrorCode>(status)); }

void axbq_string_free(char* s) { std::free(s); }

int axbq_thread_count(void) { return axbq::thread_count(); }

int axbq_config_default(axbq_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new axbq_config{}; });
}

int axbq_config_parse(const char* text, axbq_config** out, int* line, int* column) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  if (line) *line = 0;
  if (column) *column = 0;
  try {
    *out = new axbq_config{axbq::parse_config(text)};
    return AXBQ_OK;
  } catch (const axbq::ParseError& e) {
    if (line) *line = e.line();
    if (column) *column = e.column();
    return fail(e.code(), e.what());
  } catch (...) {
    return guarded([] { throw; });
  }
}

int axbq_config_load(const char* path, axbq_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new axbq_config{axbq::load_config(path)}; });
}

int axbq_config_serialize(const axbq_config* cfg, char** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  return guarded([&] { *out = duplicate(axbq::serialize_config(cfg->cfg)); });
}

int axbq_config_set(axbq_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("cfg");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] { axbq::set_config_value(cfg->cfg, key, value); });
}

int axbq_config_get(const axbq_config* cfg, const char* key, char** out) {
  if (!cfg) return null_argument("cfg");
  if (!key) return null_argument("key");
  if (!out) return null_argument("out");
  return guarded([&] { *out = duplicate(axbq::get_config_value(cfg->cfg, key)); });
}

void axbq_config_free(axbq_config* cfg) { delete cfg; }

int axbq_cmd_run(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status) {
  if (!cfg) return null_argument("cfg");
  return run_command(log, user, exit_status, [&](std::ostream* s) { return axbq::cmd_run(cfg->cfg, s); });
}

int axbq_cmd_verify(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status) {
  if (!cfg) return null_argument("cfg");
  return run_command(log, user, exit_status, [&](std::ostream* s) { return axbq::cmd_verify(cfg->cfg, s); });
}

int axbq_cmd_convergence(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status) {
  if (!cfg) return null_argument("cfg");
  return run_command(log, user, exit_status, [&](std::ostream* s) { return axbq::cmd_convergence(cfg->cfg, s); });
}

int axbq_cmd_plotdata(const char* run_dir, const char* out_dir, axbq_log_fn log, void* user, int* files_written) {
  if (!run_dir) return null_argument("run_dir");
  if (!out_dir) return null_argument("out_dir");
  if (files_written) *files_written = 0;
  int exit_status = 0;
  return run_command(log, user, &exit_status, [&](std::ostream* s) {
    axbq::CommandResult r = axbq::cmd_plotdata(run_dir, out_dir, s);
    if (files_written) *files_written = static_cast<int>(r.files.size());
    return r;
  });
}

int axbq_state_create(const axbq_config* cfg, double kappa, axbq_state** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto& g = cfg->cfg.grid;
    const axbq::GridSpec grid = axbq::make_grid(g.nr, g.nz, g.rmax, g.zmin, g.zmax);
    *out = new axbq_state{axbq::make_initial_state(grid, kappa, cfg->cfg.init_spec())};
  });
}

int axbq_state_step(axbq_state* s, const axbq_config* cfg, int nsteps) {
  if (!s) return null_argument("s");
  if (!cfg) return null_argument("cfg");
  if (nsteps < 0) return fail(axbq::ErrorCode::invalid_argument, "nsteps must be >= 0");
  return guarded([&] {
    const axbq::StepConfig sc = cfg->cfg.step_config();
    axbq::Integrator integ(s->state.grid(), s->state.kappa);
    axbq::SimState next = s->state;
    for (int k = 0; k < nsteps; ++k) next = integ.step(next, sc);
    s->state = std::move(next);
  });
}

int axbq_state_time(const axbq_state* s, double* t) {
  if (!s) return null_argument("s");
  if (!t) return null_argument("t");
  *t = s->state.t;
  return AXBQ_OK;
}

int axbq_state_dims(const axbq_state* s, int* nr, int* nz) {
  if (!s) return null_argument("s");
  if (nr) *nr = s->state.grid().nr;
  if (nz) *nz = s->state.grid().nz;
  return AXBQ_OK;
}

int axbq_state_field(const axbq_state* s, const char* name, double* out, size_t len) {
  if (!s) return null_argument("s");
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  const std::string n = name;
  const axbq::ScalarField* f = n == "rho"    ? &s->state.rho
                               : n == "zeta" ? &s->state.zeta
                               : n == "vr"   ? &s->state.v.vr
                               : n == "vz"   ? &s->state.v.vz
                               : n == "psi"  ? &s->state.psi
                                             : nullptr;
  if (!f) return fail(axbq::ErrorCode::invalid_argument, "unknown field '" + n + "'");
  if (len < f->raw().size())
    return fail(axbq::ErrorCode::invalid_dimension,
                "buffer holds " + std::to_string(len) + " values, need " + std::to_string(f->raw().size()));
  std::memcpy(out, f->raw().data(), f->raw().size() * sizeof(double));
  return AXBQ_OK;
}

int axbq_state_save(const axbq_state* s, const char* path) {
  if (!s) return null_argument("s");
  if (!path) return null_argument("path");
  return guarded([&] { axbq::write_checkpoint(path, s->state); });
}

int axbq_state_load(const char* path, axbq_state** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new axbq_state{axbq::read_checkpoint(path)}; });
}

void axbq_state_free(axbq_state* s) { delete s; }

}  // extern "C"
