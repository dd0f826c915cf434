// Parameter grids, lifetimes and N(Omega) curves.
#pragma once

#include "fmq/dynamics.hpp"
#include "fmq/single_qubit.hpp"
#include "fmq/two_qubit.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fmq {

inline constexpr double kLifetimeThreshold = 1e-2;
inline constexpr double kWeakCouplingHorizon = 1e3;
inline constexpr double kStrongCouplingHorizon = 1e5;

/// Default integration horizon for the coupling regime of p.
double default_horizon(const QubitCavityParams<double>& p);

struct LifetimeResult {
  std::vector<std::pair<std::string, double>> point;
  // Last down-crossing below the threshold; +inf when the series is still at
  // or above it at the horizon.
  double lifetime = std::numeric_limits<double>::infinity();
  bool beyond_horizon = true;
  double horizon = 0;
};

/// Largest t* with value(t) < epsilon on (t*, horizon]; crossings are
/// interpolated linearly. Samples after `horizon` are ignored (a non-positive
/// horizon means the last sample). NaN samples count as below threshold.
LifetimeResult lifetime(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                        double epsilon = kLifetimeThreshold, double horizon = 0);

struct DeltaRule {
  enum class Kind { fixed, ratio };
  Kind kind = Kind::fixed;
  double value = 0;

  static DeltaRule fixed(double delta) { return {Kind::fixed, delta}; }
  static DeltaRule ratio(double delta_over_omega) { return {Kind::ratio, delta_over_omega}; }
  double delta(double omega) const { return kind == Kind::fixed ? value : value * omega; }
};

struct NmPoint {
  double omega = 0;
  double delta = 0;
  NonMarkovianityResult<double> result;
};

/// One non-Markovianity evaluation per Omega; points run concurrently and the
/// first failure (by position) is rethrown.
std::vector<NmPoint> nm_curve(const QubitCavityParams<double>& p, DeltaRule rule,
                              const std::vector<double>& omega_values,
                              const NonMarkovianityOptions& opt = {},
                              unsigned threads = 0);

enum class Quantity { coherence, qfi, gamma_t, non_markovianity, two_qubit_resources };

std::string to_string(Quantity q);
Quantity parse_quantity(const std::string& s);

struct Axis {
  // lambda | delta | omega | delta_over_omega | r
  std::string name;
  std::vector<double> values;

  static Axis linear(std::string name, double lo, double hi, int n);
  static Axis log(std::string name, double lo, double hi, int n);
};

struct SweepSpec {
  std::vector<Axis> axes;
  QubitCavityParams<double> params;
  ModulationDrive<double> drive;
  // When set, delta = ratio * omega at every point unless delta is an axis.
  std::optional<double> delta_over_omega;
  EWLParams<double> ewl;
  Quantity quantity = Quantity::coherence;
  SolverConfig<double> solver;
  NonMarkovianityOptions nm;
  double lifetime_threshold = kLifetimeThreshold;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
  std::size_t size() const;
};

struct SweepRow {
  std::size_t index = 0;
  std::vector<double> point;   // one value per axis
  std::vector<double> values;  // one value per SweepTable::value_names
  std::string error;           // empty on success
};

struct SweepTable {
  std::vector<std::string> axis_names;
  std::vector<std::string> value_names;
  std::vector<SweepRow> rows;  // grid order, first axis slowest
};

std::vector<std::string> value_names(Quantity q);

/// Evaluates the selected quantity at every grid point. Failures are recorded
/// in the row's error field.
SweepTable run_sweep(const SweepSpec& spec);

}  // namespace fmq
