#include "fmq/figures.hpp"

#include <array>
#include <filesystem>
#include <sstream>

namespace fmq {

namespace {

constexpr double kJ0 = kBesselFirstZeros[0];

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Builder {
  const RunConfig& base;
  std::vector<FigureCurve> curves;

  RunConfig start(Mode mode, double lambda) const {
    RunConfig c;
    c.mode = mode;
    c.params.lambda = lambda;
    c.solver.rel_tol = base.solver.rel_tol;
    c.solver.abs_tol = base.solver.abs_tol;
    c.solver.backend = base.solver.backend;
    c.solver.richardson = base.solver.richardson;
    c.nm.rel_tol = base.nm.rel_tol;
    c.nm.abs_tol = base.nm.abs_tol;
    c.tau_q = base.tau_q;
    c.threads = base.threads;
    c.long_mode = base.long_mode;
    return c;
  }

  double pick(double desk, double long_run) const { return base.long_mode ? long_run : desk; }

  void series(Mode mode, double lambda, const std::string& name, double delta, double omega,
              double t_max, int samples = 20000) {
    RunConfig c = start(mode, lambda);
    c.drive = {delta, omega};
    c.solver.t_max = t_max;
    c.solver.sample_dt = t_max / samples;
    curves.push_back({name, c});
  }

  void nm(double lambda, const std::string& name, DeltaRule rule, double w_lo, double w_hi,
          int points, double horizon) {
    RunConfig c = start(Mode::sweep_nm, lambda);
    if (rule.kind == DeltaRule::Kind::ratio) c.delta_over_omega = rule.value;
    else c.drive.delta = rule.value;
    c.omega_min = w_lo;
    c.omega_max = w_hi;
    c.omega_points = points;
    c.nm.horizon = horizon;
    c.nm.forced = true;
    curves.push_back({name, c});
  }

  void ewl(EwlKind kind, double lambda, const std::string& name, double r, bool driven,
           double t_max) {
    const double w = driven ? 5 : 0;
    series(Mode::pair, lambda, name, kJ0 * w, w, t_max);
    curves.back().config.ewl = EWLParams<double>{kind, r};
  }
};

const std::vector<std::string> kIds{
    "fig2a", "fig2b", "fig3",  "fig4a", "fig4b", "fig4c", "fig4d", "fig5a",  "fig5b",
    "fig5c", "fig5d", "fig6a", "fig6b", "fig6c", "fig6d", "fig7",  "fig8",   "fig9",
    "fig10", "fig9plus"};

}  // namespace

std::vector<std::string> figure_ids() { return kIds; }

std::vector<FigureCurve> figure_curves(const std::string& id, const RunConfig& base) {
  Builder b{base, {}};
  if (id == "fig2a" || id == "fig2b") {
    const double t_max = b.pick(40, 200);
    if (id == "fig2a") {
      b.series(Mode::single, 3, "off", 0, 0, t_max);
      for (double w : {0.1, 1.0, 100.0}) b.series(Mode::single, 3, "omega" + num(w), 10, w, t_max);
    } else {
      for (double w : {0.5, 1.0}) b.series(Mode::single, 3, "omega" + num(w), 10, w, t_max);
    }
  } else if (id == "fig3") {
    for (double d : {1.0, 5.0, 10.0})
      b.nm(3, "delta" + num(d), DeltaRule::fixed(d), 0.01, 100, 41, kWeakCouplingHorizon);
  } else if (id.size() == 5 && id.rfind("fig4", 0) == 0 && id[4] >= 'a' && id[4] <= 'd') {
    const double horizon = kStrongCouplingHorizon;
    auto ratio = [&](int n) {
      const double j = kBesselFirstZeros[n];
      b.nm(0.01, "ratio" + num(j), DeltaRule::ratio(j), 0.01, 40, 25, horizon);
    };
    auto fixed = [&](double d) {
      b.nm(0.01, "delta" + num(d), DeltaRule::fixed(d), 0.01, 40, 25, horizon);
    };
    switch (id[4]) {
      case 'a': ratio(0), ratio(1); break;
      case 'b': ratio(2); break;
      case 'c': fixed(0.1), fixed(1); break;
      case 'd': fixed(5), fixed(10); break;
    }
  } else if (id.size() == 5 && id.rfind("fig5", 0) == 0 && id[4] >= 'a' && id[4] <= 'd') {
    const double j = kBesselFirstZeros[id[4] - 'a'];
    for (double w : {0.05, 0.5, 5.0})
      b.series(Mode::single, 0.01, "omega" + num(w), j * w, w, b.pick(1e5, 1e7));
  } else if (id.size() == 5 && id.rfind("fig6", 0) == 0 && id[4] >= 'a' && id[4] <= 'd') {
    const double w = std::array{0.001, 0.05, 0.5, 5.0}[id[4] - 'a'];
    b.series(Mode::single, 0.01, "omega" + num(w), kJ0 * w, w, b.pick(2000, 2e4));
  } else if (id == "fig7") {
    const double t_max = b.pick(3000, 3e4);
    b.series(Mode::single, 0.01, "off", 0, 0, t_max);
    for (double w : {0.001, 0.9, 2.1}) b.series(Mode::single, 0.01, "omega" + num(w), 5, w, t_max);
  } else if (id == "fig8") {
    for (double w : {0.05, 0.2, 0.5, 5.0})
      b.series(Mode::single, 0.01, "omega" + num(w), kJ0 * w, w, b.pick(1e4, 1e5));
  } else if (id == "fig9" || id == "fig10") {
    const EwlKind kind = id == "fig9" ? EwlKind::Psi : EwlKind::Phi;
    for (double r : {1.0, 0.8, 0.5, 0.3})
      b.ewl(kind, 0.1, "r" + num(r), r, true, b.pick(3e4, 1e5));
  } else if (id == "fig9plus") {
    const double t_max = b.pick(1e4, 3e6);
    for (EwlKind kind : {EwlKind::Psi, EwlKind::Phi})
      for (bool driven : {false, true})
        b.ewl(kind, 0.01, std::string(kind == EwlKind::Psi ? "psi" : "phi") + (driven ? "_on" : "_off"),
              1, driven, t_max);
  } else {
    std::string ids;
    for (const auto& i : kIds) ids += (ids.empty() ? "" : ", ") + i;
    throw ConfigError("unknown figure id '" + id + "'; valid ids: " + ids);
  }
  return b.curves;
}

RunOutput run_figure(const RunConfig& cfg) {
  const auto curves = figure_curves(cfg.figure, cfg);
  const std::filesystem::path dir = cfg.output.empty() ? "." : cfg.output;
  std::filesystem::create_directories(dir);
  RunOutput out;
  for (const auto& curve : curves) {
    RunConfig c = curve.config;
    c.output = (dir / (cfg.figure + "_" + curve.name + ".csv")).string();
    RunOutput r = run(c);
    out.files.insert(out.files.end(), r.files.begin(), r.files.end());
    for (auto& w : r.warnings) out.warnings.push_back(curve.name + ": " + w);
  }
  return out;
}

}  // namespace fmq
