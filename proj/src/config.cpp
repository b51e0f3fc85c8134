#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace axbq {

namespace {

// Conversion failure at `offset` characters into the value text.
struct ValueError {
  std::string message;
  int offset = 0;
};

Error invalid(const std::string& key, const std::string& what) {
  return Error(ErrorCode::validation_error, key + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// U+2212 MINUS SIGN reads as '-'.
std::string ascii_minus(std::string s) {
  const std::string minus = "\xE2\x88\x92";
  for (auto p = s.find(minus); p != std::string::npos; p = s.find(minus, p)) s.replace(p, minus.size(), "-");
  return s;
}

double to_double(const std::string& raw) {
  const std::string s = ascii_minus(raw);
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e || s.empty()) throw ValueError{"expected a number, got '" + raw + "'", 0};
  if (std::isnan(x)) throw ValueError{"NaN is not allowed", 0};
  return x;
}

template <class Int>
Int to_integer(const std::string& raw) {
  const std::string s = ascii_minus(raw);
  Int x{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ValueError{"expected an integer, got '" + raw + "'", 0};
  return x;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValueError{"expected true or false, got '" + s + "'", 0};
}

std::string unquote(const std::string& s) {
  if (s.empty() || s.front() != '"') return s;
  if (s.size() < 2 || s.back() != '"') throw ValueError{"unterminated string", 0};
  std::string out;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (s[k] == '\\' && k + 2 < s.size()) {
      out += s[++k];
    } else if (s[k] == '"') {
      throw ValueError{"stray quote inside string", static_cast<int>(k)};
    } else {
      out += s[k];
    }
  }
  return out;
}

bool needs_quotes(const std::string& s) {
  if (s.empty() || s != trim(s)) return true;
  return s.find_first_of("#;,\"\\") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

// Splits on commas outside quotes; offsets of each item are reported so
// errors can point at the failing element.
std::vector<std::pair<std::string, int>> split_list(const std::string& s) {
  std::vector<std::pair<std::string, int>> items;
  if (trim(s).empty()) return items;
  bool in_quotes = false;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k < s.size() && s[k] == '"' && (k == 0 || s[k - 1] != '\\')) in_quotes = !in_quotes;
    if (k == s.size() || (s[k] == ',' && !in_quotes)) {
      const std::string raw = s.substr(start, k - start);
      const auto lead = raw.find_first_not_of(" \t");
      items.emplace_back(trim(raw), static_cast<int>(start + (lead == std::string::npos ? 0 : lead)));
      if (items.back().first.empty()) throw ValueError{"empty list element", items.back().second};
      start = k + 1;
    }
  }
  return items;
}

template <class T, class Fn>
std::vector<T> to_list(const std::string& s, Fn convert) {
  std::vector<T> out;
  for (const auto& [item, offset] : split_list(s)) {
    try {
      out.push_back(convert(item));
    } catch (ValueError& e) {
      e.offset += offset;
      throw;
    }
  }
  return out;
}

template <class T, class Fn>
std::string join(const std::vector<T>& xs, Fn fmt) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? ", " : "") + fmt(xs[k]);
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define AXBQ_DOUBLE(KEY, MEMBER)                                                        \
  Field {                                                                               \
    KEY, [](const ExperimentConfig& c) { return format_double(c.MEMBER); },             \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_double(v); }      \
  }
#define AXBQ_INT(KEY, MEMBER)                                                           \
  Field {                                                                               \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },            \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_integer<int>(v); } \
  }
#define AXBQ_BOOL(KEY, MEMBER)                                                          \
  Field {                                                                               \
    KEY, [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_bool(v); }        \
  }
#define AXBQ_STRING(KEY, MEMBER)                                                        \
  Field {                                                                               \
    KEY, [](const ExperimentConfig& c) { return quote(c.MEMBER); },                     \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = unquote(v); }        \
  }
#define AXBQ_DOUBLES(KEY, MEMBER)                                                         \
  Field {                                                                                 \
    KEY, [](const ExperimentConfig& c) { return join(c.MEMBER, format_double); },         \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_list<double>(v, to_double); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      AXBQ_INT("grid.nr", grid.nr),
      AXBQ_INT("grid.nz", grid.nz),
      AXBQ_DOUBLE("grid.rmax", grid.rmax),
      AXBQ_DOUBLE("grid.zmin", grid.zmin),
      AXBQ_DOUBLE("grid.zmax", grid.zmax),
      Field{"physics.kappa",
            [](const ExperimentConfig& c) { return c.physics.kappa ? format_double(*c.physics.kappa) : "none"; },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "none")
                c.physics.kappa.reset();
              else
                c.physics.kappa = to_double(v);
            }},
      AXBQ_DOUBLES("physics.kappa_sweep", physics.kappa_sweep),
      AXBQ_DOUBLE("time.dt", time.dt),
      AXBQ_DOUBLE("time.t_end", time.t_end),
      AXBQ_INT("time.cadence", time.cadence),
      AXBQ_DOUBLE("time.cfl_max", time.cfl_max),
      AXBQ_BOOL("time.cfl_enforce", time.cfl_enforce),
      AXBQ_STRING("time.advection", time.advection),
      AXBQ_STRING("init.preset", init.preset),
      AXBQ_DOUBLE("init.rho_amplitude", init.rho_amplitude),
      AXBQ_DOUBLE("init.rho_width", init.rho_width),
      AXBQ_DOUBLE("init.rho_center", init.rho_center),
      AXBQ_DOUBLE("init.zeta_amplitude", init.zeta_amplitude),
      AXBQ_DOUBLE("init.zeta_width", init.zeta_width),
      AXBQ_DOUBLE("init.zeta_center", init.zeta_center),
      Field{"monitors.enabled", [](const ExperimentConfig& c) { return join(c.monitors.enabled, quote); },
            [](ExperimentConfig& c, const std::string& v) { c.monitors.enabled = to_list<std::string>(v, unquote); }},
      AXBQ_DOUBLES("monitors.max_principle_p", monitors.max_principle_p),
      AXBQ_BOOL("monitors.companion", monitors.companion),
      AXBQ_DOUBLE("monitors.transport_amplitude", monitors.transport_amplitude),
      AXBQ_DOUBLE("monitors.stability_delta", monitors.stability_delta),
      AXBQ_STRING("output.directory", output.directory),
      AXBQ_INT("output.checkpoint_every", output.checkpoint_every),
      AXBQ_BOOL("output.besov_report", output.besov_report),
      Field{"verify.seed", [](const ExperimentConfig& c) { return std::to_string(c.verify.seed); },
            [](ExperimentConfig& c, const std::string& v) { c.verify.seed = to_integer<std::uint64_t>(v); }},
      AXBQ_INT("verify.random_fields", verify.random_fields),
      AXBQ_DOUBLE("verify.h_coarse", verify.h_coarse),
      AXBQ_INT("verify.levels", verify.levels),
      AXBQ_BOOL("verify.mutation", verify.mutation),
  };
  return table;
}

#undef AXBQ_DOUBLE
#undef AXBQ_INT
#undef AXBQ_BOOL
#undef AXBQ_STRING
#undef AXBQ_DOUBLES

const Field* find_field(const std::string& key) {
  for (const Field& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

// Cuts an unquoted '#' or ';' comment; returns the value text.
std::string strip_comment(const std::string& s, std::size_t from) {
  bool in_quotes = false;
  for (std::size_t k = from; k < s.size(); ++k) {
    if (s[k] == '"' && (k == 0 || s[k - 1] != '\\')) in_quotes = !in_quotes;
    if (!in_quotes && (s[k] == '#' || s[k] == ';')) return s.substr(from, k - from);
  }
  return s.substr(from);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw invalid(key, what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::vector<double> ExperimentConfig::kappas() const {
  if (physics.kappa) return {*physics.kappa};
  return physics.kappa_sweep;
}

GridSpec ExperimentConfig::grid_spec() const { return GridSpec{grid.nr, grid.nz, grid.rmax, grid.zmin, grid.zmax}; }

StepConfig ExperimentConfig::step_config() const {
  StepConfig s;
  s.dt = time.dt;
  s.cfl_max = time.cfl_max;
  s.cfl_enforce = time.cfl_enforce;
  s.advection_scheme = parse_advection_scheme(time.advection);
  return s;
}

InitSpec ExperimentConfig::init_spec() const {
  return InitSpec{init.preset,         init.rho_amplitude, init.rho_width,  init.rho_center,
                  init.zeta_amplitude, init.zeta_width,    init.zeta_center};
}

const std::vector<std::string>& monitor_names() {
  static const std::vector<std::string> names{"max_principle", "energy",       "zeta_envelope", "gamma_energy",
                                              "gamma1_energy", "hls",          "log_estimate",  "stability"};
  return names;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

void validate(const ExperimentConfig& c) {
  require(c.grid.nr > 0, "grid.nr", "must be positive");
  require(c.grid.nz > 0, "grid.nz", "must be positive");
  require(std::isfinite(c.grid.rmax) && c.grid.rmax > 0, "grid.rmax", "must be positive");
  require(std::isfinite(c.grid.zmin), "grid.zmin", "must be finite");
  require(std::isfinite(c.grid.zmax) && c.grid.zmax > c.grid.zmin, "grid.zmax", "must exceed grid.zmin");

  if (c.physics.kappa) require(finite_nonneg(*c.physics.kappa), "physics.kappa", "must be >= 0");
  for (double k : c.physics.kappa_sweep) require(finite_nonneg(k), "physics.kappa_sweep", "values must be >= 0");
  require(c.physics.kappa || !c.physics.kappa_sweep.empty(), "physics.kappa_sweep", "empty and physics.kappa unset");
  std::set<double> distinct(c.physics.kappa_sweep.begin(), c.physics.kappa_sweep.end());
  require(distinct.size() == c.physics.kappa_sweep.size(), "physics.kappa_sweep", "duplicate value");

  require(std::isfinite(c.time.dt) && c.time.dt > 0, "time.dt", "must be positive");
  require(finite_nonneg(c.time.t_end), "time.t_end", "must be >= 0");
  require(c.time.cadence >= 1, "time.cadence", "must be >= 1");
  require(std::isfinite(c.time.cfl_max) && c.time.cfl_max > 0, "time.cfl_max", "must be positive");
  require(c.time.advection == "upwind2" || c.time.advection == "centered_rk2", "time.advection",
          "must be upwind2 or centered_rk2");

  const auto& presets = preset_names();
  require(std::find(presets.begin(), presets.end(), c.init.preset) != presets.end(), "init.preset",
          "unknown preset '" + c.init.preset + "'");
  require(std::isfinite(c.init.rho_amplitude), "init.rho_amplitude", "must be finite");
  require(std::isfinite(c.init.rho_width) && c.init.rho_width > 0, "init.rho_width", "must be positive");
  require(std::isfinite(c.init.rho_center), "init.rho_center", "must be finite");
  require(std::isfinite(c.init.zeta_amplitude), "init.zeta_amplitude", "must be finite");
  require(std::isfinite(c.init.zeta_width) && c.init.zeta_width > 0, "init.zeta_width", "must be positive");
  require(std::isfinite(c.init.zeta_center), "init.zeta_center", "must be finite");

  const auto& names = monitor_names();
  for (const std::string& m : c.monitors.enabled)
    require(std::find(names.begin(), names.end(), m) != names.end(), "monitors.enabled", "unknown check '" + m + "'");
  for (double p : c.monitors.max_principle_p)
    require(p == 1.0 || p == 2.0 || p == 3.0 || p == INFINITY, "monitors.max_principle_p", "values must be 1, 2, 3 or inf");
  require(std::isfinite(c.monitors.transport_amplitude), "monitors.transport_amplitude", "must be finite");
  require(std::isfinite(c.monitors.stability_delta) && c.monitors.stability_delta > 0, "monitors.stability_delta",
          "must be positive");

  require(!c.output.directory.empty(), "output.directory", "must not be empty");
  require(c.output.checkpoint_every >= 0, "output.checkpoint_every", "must be >= 0");

  require(c.verify.random_fields >= 1, "verify.random_fields", "must be >= 1");
  require(std::isfinite(c.verify.h_coarse) && c.verify.h_coarse > 0, "verify.h_coarse", "must be positive");
  require(c.verify.levels >= 2, "verify.levels", "must be >= 2");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::set<std::string> sections;
  for (const Field& f : fields()) sections.insert(section_of(f.key));

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
    const int col0 = static_cast<int>(first) + 1;

    if (line[first] == '[') {
      const std::size_t close = line.find(']', first);
      if (close == std::string::npos) throw ParseError("missing ']'", lineno, static_cast<int>(line.size()) + 1);
      const std::string name = trim(line.substr(first + 1, close - first - 1));
      if (!sections.count(name)) throw ParseError("unknown section '" + name + "'", lineno, col0 + 1);
      const std::string rest = trim(strip_comment(line, close + 1));
      if (!rest.empty()) throw ParseError("unexpected text after section header", lineno, static_cast<int>(close) + 2);
      section = name;
      continue;
    }

    std::size_t k = first;
    while (k < line.size() && is_key_char(line[k])) ++k;
    if (k == first) throw ParseError("expected a key", lineno, col0);
    const std::string key = line.substr(first, k - first);
    std::size_t eq = line.find_first_not_of(" \t", k);
    if (eq == std::string::npos || line[eq] != '=')
      throw ParseError("expected '=' after '" + key + "'", lineno, static_cast<int>(eq == std::string::npos ? line.size() : eq) + 1);

    std::string full = key;
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ParseError("key '" + key + "' outside a section", lineno, col0);
      full = section + "." + key;
    }
    const Field* f = find_field(full);
    if (!f) throw ParseError("unknown key '" + full + "'", lineno, col0);
    if (!seen.insert(full).second) throw ParseError("duplicate key '" + full + "'", lineno, col0);

    const std::string raw = strip_comment(line, eq + 1);
    const std::size_t vstart = raw.find_first_not_of(" \t");
    const int value_col = static_cast<int>(eq) + 2 + static_cast<int>(vstart == std::string::npos ? 0 : vstart);
    try {
      f->set(c, trim(raw));
    } catch (const ValueError& e) {
      throw ParseError(full + ": " + e.message, lineno, value_col + e.offset);
    } catch (const Error& e) {
      throw ParseError(full + ": " + e.what(), lineno, value_col);
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out, section;
  for (const Field& f : fields()) {
    const std::string s = section_of(f.key);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += f.key.substr(s.size() + 1) + " = " + f.get(c) + "\n";
  }
  return out;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorCode::invalid_argument, "unknown key '" + key + "'");
  ExperimentConfig copy = c;
  try {
    f->set(copy, trim(value));
  } catch (const ValueError& e) {
    throw invalid(key, e.message);
  }
  validate(copy);
  c = std::move(copy);
}

std::string get_config_value(const ExperimentConfig& c, const std::string& key) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorCode::invalid_argument, "unknown key '" + key + "'");
  return f->get(c);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace axbq
