// Mode dispatch for the command-line front end.
#pragma once

#include "fmq/config.hpp"
#include "fmq/csv.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fmq {

struct RunOutput {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

CsvTable single_table(const AmplitudeTrajectory<double>& traj,
                      const InitialSuperposition<double>& init,
                      std::optional<double> tau_q);
CsvTable pair_table(const TwoQubitSeries<double>& s, std::optional<double> tau_q);
CsvTable nm_table(const std::vector<double>& omega, const std::vector<double>& delta,
                  const std::vector<double>& n);

/// Provenance comment lines: a banner plus the full config text.
std::vector<std::string> provenance(const RunConfig& cfg);

std::string default_output(Mode m);

/// Validates cfg, runs it and writes the CSV output.
RunOutput run(const RunConfig& cfg);

}  // namespace fmq
