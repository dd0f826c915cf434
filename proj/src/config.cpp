#include "fmq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace fmq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(key + ": malformed number '" + v + "'");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(key + ": malformed integer '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

double positive(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x > 0)) throw ConfigError(key + ": must be > 0 (got " + v + ")");
  return x;
}

double nonnegative(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x >= 0)) throw ConfigError(key + ": must be >= 0 (got " + v + ")");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::optional<std::string>(const RunConfig&)>;

struct KeySpec {
  ConfigKey key;
  Setter set;
  Getter get;
};

template <typename Field>
KeySpec plain_double(std::string section, std::string name, std::string help, Field field,
                     double (*check)(const std::string&, const std::string&)) {
  return {{std::move(section), std::move(name), std::move(help)},
          [field, check](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = check(k, v);
          },
          [field](const RunConfig& c) -> std::optional<std::string> {
            return fmt(field(c));
          }};
}

template <typename Field>
KeySpec optional_double(std::string section, std::string name, std::string help, Field field,
                        double (*check)(const std::string&, const std::string&)) {
  return {{std::move(section), std::move(name), std::move(help)},
          [field, check](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = check(k, v);
          },
          [field](const RunConfig& c) -> std::optional<std::string> {
            const auto& f = field(c);
            if (!f) return std::nullopt;
            return fmt(*f);
          }};
}

template <typename Field>
KeySpec complex_part(std::string section, std::string name, std::string help, Field field,
                     int part) {
  return {{std::move(section), std::move(name), std::move(help)},
          [field, part](RunConfig& c, const std::string& k, const std::string& v) {
            auto& z = field(c);
            const double x = to_double(k, v);
            z = part == 0 ? std::complex<double>(x, z.imag()) : std::complex<double>(z.real(), x);
          },
          [field, part](const RunConfig& c) -> std::optional<std::string> {
            const auto& z = field(c);
            return fmt(part == 0 ? z.real() : z.imag());
          }};
}

double unit_interval(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x >= 0 && x <= 1)) throw ConfigError(key + ": must be in [0, 1] (got " + v + ")");
  return x;
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    // [run]
    s.push_back({{"run", "mode", "single | pair | sweep-nm | lifetime | figure"},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); },
                 [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.mode); }});
    s.push_back({{"run", "output", "output file (directory for figure mode)"},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.output.empty()) return std::nullopt;
                   return c.output;
                 }});
    s.push_back({{"run", "figure", "figure id for figure mode"},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.figure = v; },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.figure.empty()) return std::nullopt;
                   return c.figure;
                 }});
    s.push_back(optional_double("run", "tau_q", "seconds per 1/gamma; adds a t_seconds column",
                                [](auto& c) -> auto& { return c.tau_q; }, positive));
    s.push_back({{"run", "long", "opt-in long horizons for figure mode"},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.long_mode = to_bool(k, v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.long_mode ? "true" : "false";
                 }});
    s.push_back({{"run", "threads", "worker threads for sweeps (0: all cores)"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   const long n = to_int(k, v);
                   if (n < 0) throw ConfigError(k + ": must be >= 0 (got " + v + ")");
                   c.threads = static_cast<unsigned>(n);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.threads); }});
    // [cavity]
    s.push_back(plain_double("cavity", "lambda", "cavity spectral width, units of gamma",
                             [](auto& c) -> auto& { return c.params.lambda; }, positive));
    s.push_back(optional_double("cavity", "omega0", "qubit frequency, units of gamma (adiabatic check)",
                                [](auto& c) -> auto& { return c.params.omega0; }, positive));
    // [drive]
    s.push_back(plain_double("drive", "delta", "modulation amplitude, units of gamma",
                             [](auto& c) -> auto& { return c.drive.delta; }, nonnegative));
    s.push_back(plain_double("drive", "omega", "modulation frequency, units of gamma",
                             [](auto& c) -> auto& { return c.drive.omega_m; }, nonnegative));
    s.push_back(optional_double("drive", "delta_over_omega", "sets delta = ratio * omega",
                                [](auto& c) -> auto& { return c.delta_over_omega; }, nonnegative));
    // [state]
    s.push_back(complex_part("state", "alpha_re", "excited amplitude, real part",
                             [](auto& c) -> auto& { return c.init.alpha; }, 0));
    s.push_back(complex_part("state", "alpha_im", "excited amplitude, imaginary part",
                             [](auto& c) -> auto& { return c.init.alpha; }, 1));
    s.push_back(complex_part("state", "beta_re", "ground amplitude, real part",
                             [](auto& c) -> auto& { return c.init.beta; }, 0));
    s.push_back(complex_part("state", "beta_im", "ground amplitude, imaginary part",
                             [](auto& c) -> auto& { return c.init.beta; }, 1));
    s.push_back({{"state", "ewl", "two-qubit state: psi | phi"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v == "psi") c.ewl.kind = EwlKind::Psi;
                   else if (v == "phi") c.ewl.kind = EwlKind::Phi;
                   else throw ConfigError(k + ": expected psi or phi, got '" + v + "'");
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.ewl.kind == EwlKind::Psi ? "psi" : "phi";
                 }});
    s.push_back(plain_double("state", "r", "EWL purity weight in [0, 1]",
                             [](auto& c) -> auto& { return c.ewl.r; }, unit_interval));
    s.push_back(complex_part("state", "mu_re", "EWL mu, real part",
                             [](auto& c) -> auto& { return c.ewl.mu; }, 0));
    s.push_back(complex_part("state", "mu_im", "EWL mu, imaginary part",
                             [](auto& c) -> auto& { return c.ewl.mu; }, 1));
    s.push_back(complex_part("state", "nu_re", "EWL nu, real part",
                             [](auto& c) -> auto& { return c.ewl.nu; }, 0));
    s.push_back(complex_part("state", "nu_im", "EWL nu, imaginary part",
                             [](auto& c) -> auto& { return c.ewl.nu; }, 1));
    // [solver]
    s.push_back(plain_double("solver", "t_max", "final time gamma t",
                             [](auto& c) -> auto& { return c.solver.t_max; }, positive));
    s.push_back(plain_double("solver", "dt_max", "maximum step; 0 selects min(1/lambda, 2pi/Omega)/10",
                             [](auto& c) -> auto& { return c.solver.dt_max; }, nonnegative));
    s.push_back(plain_double("solver", "rel_tol", "relative tolerance",
                             [](auto& c) -> auto& { return c.solver.rel_tol; }, positive));
    s.push_back(plain_double("solver", "abs_tol", "absolute tolerance",
                             [](auto& c) -> auto& { return c.solver.abs_tol; }, positive));
    s.push_back({{"solver", "backend", "ode | volterra"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v == "ode") c.solver.backend = Backend::ode_reduction;
                   else if (v == "volterra") c.solver.backend = Backend::volterra_quadrature;
                   else throw ConfigError(k + ": expected ode or volterra, got '" + v + "'");
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.solver.backend == Backend::ode_reduction ? "ode" : "volterra";
                 }});
    s.push_back(plain_double("solver", "sample_dt", "output spacing; 0 records every step",
                             [](auto& c) -> auto& { return c.solver.sample_dt; }, nonnegative));
    s.push_back({{"solver", "richardson", "Volterra backend: h, h/2 extrapolation"},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.richardson = to_bool(k, v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.solver.richardson ? "true" : "false";
                 }});
    // [nm]
    s.push_back(plain_double("nm", "horizon", "integration horizon for N",
                             [](auto& c) -> auto& { return c.nm.horizon; }, positive));
    s.push_back(plain_double("nm", "truncate_below", "stop once |C_e| drops below",
                             [](auto& c) -> auto& { return c.nm.truncate_below; }, positive));
    s.push_back({{"nm", "forced", "accept the horizon even if |C_e| is still large"},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.nm.forced = to_bool(k, v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.nm.forced ? "true" : "false";
                 }});
    s.push_back(optional_double("nm", "omega_min", "sweep-nm: smallest Omega",
                                [](auto& c) -> auto& { return c.omega_min; }, positive));
    s.push_back(optional_double("nm", "omega_max", "sweep-nm: largest Omega",
                                [](auto& c) -> auto& { return c.omega_max; }, positive));
    s.push_back({{"nm", "omega_points", "sweep-nm: number of Omega values"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   const long n = to_int(k, v);
                   if (n < 1) throw ConfigError(k + ": must be >= 1 (got " + v + ")");
                   c.omega_points = static_cast<int>(n);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.omega_points == 0) return std::nullopt;
                   return std::to_string(c.omega_points);
                 }});
    s.push_back({{"nm", "omega_scale", "sweep-nm: log | linear"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v == "log") c.omega_log = true;
                   else if (v == "linear") c.omega_log = false;
                   else throw ConfigError(k + ": expected log or linear, got '" + v + "'");
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.omega_log ? "log" : "linear";
                 }});
    s.push_back({{"nm", "omega_values", "sweep-nm: explicit comma-separated Omega list"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.omega_values.clear();
                   std::stringstream ss(v);
                   for (std::string item; std::getline(ss, item, ',');)
                     c.omega_values.push_back(positive(k, trim(item)));
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.omega_values.empty()) return std::nullopt;
                   std::string out;
                   for (double v : c.omega_values) out += (out.empty() ? "" : ", ") + fmt(v);
                   return out;
                 }});
    // [lifetime]
    s.push_back(plain_double("lifetime", "threshold", "lifetime threshold epsilon",
                             [](auto& c) -> auto& { return c.lifetime_threshold; }, positive));
    s.push_back({{"lifetime", "quantity", "coherence | qfi | two_qubit_resources"},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   Quantity q;
                   try {
                     q = parse_quantity(v);
                   } catch (const std::invalid_argument& e) {
                     throw ConfigError(k + ": " + e.what());
                   }
                   if (q == Quantity::gamma_t || q == Quantity::non_markovianity)
                     throw ConfigError(k + ": no lifetime for '" + v + "'");
                   c.quantity = q;
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.quantity); }});
    return s;
  }();
  return specs;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_specs())
    if (k.key.name == name) return &k;
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& k : key_specs())
    if (k.key.section == s) return true;
  return false;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::single: return "single";
    case Mode::pair: return "pair";
    case Mode::sweep_nm: return "sweep-nm";
    case Mode::lifetime: return "lifetime";
    case Mode::figure: return "figure";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::single, Mode::pair, Mode::sweep_nm, Mode::lifetime, Mode::figure})
    if (to_string(m) == s) return m;
  throw ConfigError("mode: unknown mode '" + s + "' (single, pair, sweep-nm, lifetime, figure)");
}

ModulationDrive<double> RunConfig::effective_drive() const {
  ModulationDrive<double> d = drive;
  if (delta_over_omega) d.delta = *delta_over_omega * d.omega_m;
  return d;
}

std::vector<double> RunConfig::omega_grid() const {
  if (!omega_values.empty()) return omega_values;
  if (!omega_min || !omega_max || omega_points < 1)
    throw ConfigError("sweep-nm: set omega_values, or omega_min, omega_max and omega_points");
  return (omega_log ? Axis::log("omega", *omega_min, *omega_max, omega_points)
                    : Axis::linear("omega", *omega_min, *omega_max, omega_points))
      .values;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& k : key_specs()) out.push_back(k.key);
    return out;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeySpec* spec = find_key(key);
    if (!spec) fail("unknown key '" + key + "'");
    if (!section.empty() && spec->key.section != section)
      fail("key '" + key + "' belongs in [" + spec->key.section + "], not [" + section + "]");
    try {
      spec->set(cfg, key, value);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    spec->set(cfg, key, trim(value));
  }
}

void validate(const RunConfig& cfg) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  };
  wrap([&] { validate(cfg.params, cfg.effective_drive(), cfg.solver); });
  switch (cfg.mode) {
    case Mode::single:
      wrap([&] { cfg.init.validate(); });
      break;
    case Mode::pair:
      wrap([&] { cfg.ewl.validate(); });
      break;
    case Mode::sweep_nm: {
      const auto grid = cfg.omega_grid();
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError("omega_values: must be increasing");
      break;
    }
    case Mode::lifetime:
      if (cfg.quantity == Quantity::two_qubit_resources) wrap([&] { cfg.ewl.validate(); });
      break;
    case Mode::figure:
      if (cfg.figure.empty()) throw ConfigError("figure: required in figure mode");
      break;
  }
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : key_specs()) {
    const auto v = k.get(cfg);
    if (!v) continue;
    if (k.key.section != section) {
      section = k.key.section;
      out += "[" + section + "]\n";
    }
    out += k.key.name + " = " + *v + "\n";
  }
  return out;
}

std::string config_text_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("#", 0) != 0) break;
    out += trim(line.substr(1)) + "\n";
  }
  return out;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const bool is_csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (is_csv) text = config_text_from_csv(text);
  return parse_config(text, path);
}

}  // namespace fmq
