// Command-line front end. Uses only the C interface.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "axbq/axbq.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<double> kappa;
  std::optional<long long> seed;
  std::string run_dir;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--kappa", o.kappa, "run a single kappa instead of the sweep");
  cmd->add_option("--seed", o.seed, "seed of the random test fields");
}

int report(int status) {
  std::fprintf(stderr, "error: %s: %s\n", axbq_status_string(status), axbq_last_error());
  return AXBQ_EXIT_ERROR;
}

void print_line(const char* line, void*) { std::printf("%s\n", line); std::fflush(stdout); }

// Owns a config handle.
struct Config {
  axbq_config* p = nullptr;
  ~Config() { axbq_config_free(p); }
};

// --out names the output directory, except for plotdata where it names the plot directory.
int load(const Options& o, Config& c, bool out_is_output_directory) {
  int st = AXBQ_OK;
  if (o.config.empty()) {
    st = axbq_config_default(&c.p);
  } else {
    std::FILE* f = std::fopen(o.config.c_str(), "rb");
    if (!f) {
      std::fprintf(stderr, "error: cannot open %s\n", o.config.c_str());
      return AXBQ_IO_ERROR;
    }
    std::string text;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, n);
    std::fclose(f);
    st = axbq_config_parse(text.c_str(), &c.p, nullptr, nullptr);
    if (st == AXBQ_PARSE_ERROR) {
      std::fprintf(stderr, "%s: %s\n", o.config.c_str(), axbq_last_error());
      return st;
    }
  }
  if (st == AXBQ_OK && out_is_output_directory && !o.out.empty()) st = axbq_config_set(c.p, "output.directory", o.out.c_str());
  if (st == AXBQ_OK && o.kappa) st = axbq_config_set(c.p, "physics.kappa", std::to_string(*o.kappa).c_str());
  if (st == AXBQ_OK && o.seed) st = axbq_config_set(c.p, "verify.seed", std::to_string(*o.seed).c_str());
  if (st != AXBQ_OK) report(st);
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric Boussinesq workbench"};
  app.set_version_flag("--version", std::string(axbq_version()));
  app.require_subcommand(1);

  Options o;
  CLI::App* run = app.add_subcommand("run", "evolve every kappa of the sweep and apply the monitors");
  CLI::App* verify = app.add_subcommand("verify", "operator identities, elliptic bounds and partition checks");
  CLI::App* convergence = app.add_subcommand("convergence", "convergence CSVs of the operator identities");
  CLI::App* plotdata = app.add_subcommand("plotdata", "plot files from a run or verify directory");
  for (CLI::App* c : {run, verify, convergence, plotdata}) add_common(c, o);
  plotdata->add_option("run_dir", o.run_dir, "directory to read (default: output.directory of the config)");

  CLI11_PARSE(app, argc, argv);

  Config cfg;
  if (const int st = load(o, cfg, !plotdata->parsed()); st != AXBQ_OK) return AXBQ_EXIT_ERROR;

  int exit_status = AXBQ_EXIT_ERROR;
  int st = AXBQ_OK;
  if (run->parsed()) {
    st = axbq_cmd_run(cfg.p, print_line, nullptr, &exit_status);
  } else if (verify->parsed()) {
    st = axbq_cmd_verify(cfg.p, print_line, nullptr, &exit_status);
  } else if (convergence->parsed()) {
    st = axbq_cmd_convergence(cfg.p, print_line, nullptr, &exit_status);
  } else {
    std::string run_dir = o.run_dir;
    if (run_dir.empty()) {
      char* dir = nullptr;
      if ((st = axbq_config_get(cfg.p, "output.directory", &dir)) != AXBQ_OK) return report(st);
      run_dir = dir;
      axbq_string_free(dir);
      // the serialized value may be quoted
      if (run_dir.size() >= 2 && run_dir.front() == '"') run_dir = run_dir.substr(1, run_dir.size() - 2);
    }
    const std::string out = o.out.empty() ? run_dir + "/plots" : o.out;
    int files = 0;
    st = axbq_cmd_plotdata(run_dir.c_str(), out.c_str(), print_line, nullptr, &files);
    exit_status = st == AXBQ_OK ? AXBQ_EXIT_OK : AXBQ_EXIT_ERROR;
  }
  if (st != AXBQ_OK) return report(st);
  return exit_status;
}
