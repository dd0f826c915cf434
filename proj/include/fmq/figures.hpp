// Parameter sets for the published figures.
#pragma once

#include "fmq/config.hpp"
#include "fmq/runner.hpp"

#include <string>
#include <vector>

namespace fmq {

struct FigureCurve {
  std::string name;
  RunConfig config;
};

std::vector<std::string> figure_ids();

/// Curves of figure `id`; solver tolerances, threads, tau_q and long mode are
/// taken from base. Unknown ids throw ConfigError listing the valid ones.
std::vector<FigureCurve> figure_curves(const std::string& id, const RunConfig& base);

/// Writes <dir>/<id>_<curve>.csv for every curve.
RunOutput run_figure(const RunConfig& cfg);

}  // namespace fmq
