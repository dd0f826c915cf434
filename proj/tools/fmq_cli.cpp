// fmq: frequency-modulated qubit in a leaky cavity.
#include "fmq/figures.hpp"
#include "fmq/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

std::string dashed(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-modulated qubit in a leaky cavity: time series, sweeps and figures"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("-c,--config", config_path, "config file (or a CSV written by fmq)");

  std::map<std::string, std::string> overrides;
  bool long_flag = false;
  for (const auto& key : fmq::config_keys()) {
    if (key.name == "mode" || key.name == "long" || key.name == "figure") continue;
    std::string names = "--" + key.name;
    if (key.name.find('_') != std::string::npos) names += ",--" + dashed(key.name);
    if (key.name == "output") names = "-o," + names;
    app.add_option_function<std::string>(
           names, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
           key.help + " [" + key.section + "]")
        ->type_name("VALUE");
  }
  app.add_flag("--long", long_flag, "opt-in long horizons for figure mode");
  std::vector<std::string> sets;
  app.add_option("--set", sets, "generic key=value override")->type_name("KEY=VALUE");

  auto* single = app.add_subcommand("single", "single-qubit time series");
  auto* pair = app.add_subcommand("pair", "two-qubit resource time series");
  auto* sweep = app.add_subcommand("sweep-nm", "non-Markovianity versus Omega");
  auto* life = app.add_subcommand("lifetime", "resource lifetimes by threshold crossing");
  auto* figure = app.add_subcommand("figure", "reproduce a figure: one CSV per curve");
  std::string figure_id;
  bool list_figures = false;
  figure->add_option("id", figure_id, "figure id");
  figure->add_flag("--list", list_figures, "print the valid figure ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_figures) {
      for (const auto& id : fmq::figure_ids()) std::cout << id << "\n";
      return 0;
    }
    fmq::RunConfig cfg = config_path.empty() ? fmq::RunConfig{} : fmq::load_config_file(config_path);
    if (single->parsed()) cfg.mode = fmq::Mode::single;
    if (pair->parsed()) cfg.mode = fmq::Mode::pair;
    if (sweep->parsed()) cfg.mode = fmq::Mode::sweep_nm;
    if (life->parsed()) cfg.mode = fmq::Mode::lifetime;
    if (figure->parsed()) {
      cfg.mode = fmq::Mode::figure;
      if (!figure_id.empty()) cfg.figure = figure_id;
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw fmq::ConfigError("--set expects KEY=VALUE, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (long_flag) overrides["long"] = "true";
    fmq::apply_overrides(cfg, overrides);

    const fmq::RunOutput out = fmq::run(cfg);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : out.files) std::cout << f << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
