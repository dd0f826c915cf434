// Run configuration: line-oriented `key = value` text with [section] headers.
#pragma once

#include "fmq/dynamics.hpp"
#include "fmq/single_qubit.hpp"
#include "fmq/sweep.hpp"
#include "fmq/two_qubit.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmq {

enum class Mode { single, pair, sweep_nm, lifetime, figure };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Mode mode = Mode::single;
  std::string output;  // file, or directory for figure mode; empty: default
  std::string figure;
  std::optional<double> tau_q;  // seconds per 1/gamma
  bool long_mode = false;
  unsigned threads = 0;

  QubitCavityParams<double> params;
  ModulationDrive<double> drive;
  std::optional<double> delta_over_omega;

  InitialSuperposition<double> init;
  EWLParams<double> ewl;

  SolverConfig<double> solver;

  NonMarkovianityOptions nm;
  std::optional<double> omega_min, omega_max;
  int omega_points = 0;
  bool omega_log = true;
  std::vector<double> omega_values;

  double lifetime_threshold = kLifetimeThreshold;
  Quantity quantity = Quantity::coherence;

  /// Drive with delta_over_omega applied.
  ModulationDrive<double> effective_drive() const;
  /// Omega grid for sweep-nm.
  std::vector<double> omega_grid() const;
};

/// Parses config text. Errors carry the line number; `origin` names the
/// source in messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");

/// Applies `key = value` pairs on top of cfg (flags beat file values).
void apply_overrides(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// Cross-field checks and mode-required keys.
void validate(const RunConfig& cfg);

/// Canonical text; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& cfg);

/// Recovers config text from the `# ` provenance lines at the top of a CSV.
std::string config_text_from_csv(const std::string& csv_text);

/// Reads a config or CSV file (by its provenance header).
RunConfig load_config_file(const std::string& path);

struct ConfigKey {
  std::string section;
  std::string name;
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

}  // namespace fmq
