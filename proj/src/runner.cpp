#include "fmq/runner.hpp"

#include "fmq/figures.hpp"

#include <cmath>
#include <sstream>

namespace fmq {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void add_time(CsvTable& t, const Eigen::VectorXd& times, std::optional<double> tau_q) {
  t.add("gamma_t", times);
  if (tau_q) t.add("t_seconds", times * *tau_q);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CsvTable single_table(const AmplitudeTrajectory<double>& traj,
                      const InitialSuperposition<double>& init,
                      std::optional<double> tau_q) {
  CsvTable t;
  add_time(t, traj.times, tau_q);
  t.add("re_C", traj.amplitudes.real());
  t.add("im_C", traj.amplitudes.imag());
  // l1 coherence of the reduced state; |C_e| for the balanced superposition.
  t.add("coherence", 2 * std::abs(init.alpha * std::conj(init.beta)) * coherence(traj));
  t.add("qfi", qfi(traj));
  t.add("phase_error", phase_error(traj));
  const auto rates = decay_rate(traj);
  t.add("gamma_of_t", rates.gamma_t);
  t.add("lamb_shift", rates.lamb_shift);
  return t;
}

CsvTable pair_table(const TwoQubitSeries<double>& s, std::optional<double> tau_q) {
  CsvTable t;
  add_time(t, s.times, tau_q);
  t.add("concurrence", s.concurrence);
  t.add("discord", s.discord);
  t.add("zeta2", s.zeta2);
  return t;
}

CsvTable nm_table(const std::vector<double>& omega, const std::vector<double>& delta,
                  const std::vector<double>& n) {
  CsvTable t;
  t.add("omega_over_gamma", to_vector(omega));
  t.add("delta_over_gamma", to_vector(delta));
  t.add("N", to_vector(n));
  return t;
}

std::vector<std::string> provenance(const RunConfig& cfg) {
  std::vector<std::string> out{"# fmq " + to_string(cfg.mode) + " run; rates in units of gamma"};
  std::istringstream in(to_config_text(cfg));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string default_output(Mode m) {
  return m == Mode::figure ? "." : to_string(m) + ".csv";
}

RunOutput run(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.mode == Mode::figure) return run_figure(cfg);

  RunOutput res;
  const std::string path = cfg.output.empty() ? default_output(cfg.mode) : cfg.output;
  const ModulationDrive<double> drive = cfg.effective_drive();
  for (auto& w : adiabatic_warnings(cfg.params, drive)) res.warnings.push_back(w);

  CsvTable table;
  switch (cfg.mode) {
    case Mode::single: {
      const auto traj = solve_amplitude(cfg.params, drive, cfg.solver);
      table = single_table(traj, cfg.init, cfg.tau_q);
      break;
    }
    case Mode::pair: {
      const auto traj = solve_amplitude(cfg.params, drive, cfg.solver);
      table = pair_table(resource_time_series(cfg.ewl, traj), cfg.tau_q);
      break;
    }
    case Mode::sweep_nm: {
      SweepSpec spec;
      spec.params = cfg.params;
      spec.drive = cfg.drive;
      spec.delta_over_omega = cfg.delta_over_omega;
      spec.quantity = Quantity::non_markovianity;
      spec.nm = cfg.nm;
      spec.threads = cfg.threads;
      spec.axes = {Axis{"omega", cfg.omega_grid()}};
      const SweepTable st = run_sweep(spec);
      std::vector<double> omega, delta, n;
      for (const auto& row : st.rows) {
        omega.push_back(row.point[0]);
        delta.push_back(cfg.delta_over_omega ? *cfg.delta_over_omega * row.point[0] : cfg.drive.delta);
        n.push_back(row.values[0]);
        if (!row.error.empty()) {
          res.warnings.push_back("error at omega = " + fmt(row.point[0]) + ": " + row.error);
        }
      }
      table = nm_table(omega, delta, n);
      break;
    }
    case Mode::lifetime: {
      const auto traj = solve_amplitude(cfg.params, drive, cfg.solver);
      const double eps = cfg.lifetime_threshold;
      const double horizon = traj.times[traj.size() - 1];
      table.add("threshold", Eigen::VectorXd::Constant(1, eps));
      table.add("horizon", Eigen::VectorXd::Constant(1, horizon));
      auto add = [&](const std::string& name, const Eigen::VectorXd& v) {
        table.add("lifetime_" + name, Eigen::VectorXd::Constant(1, lifetime(traj.times, v, eps).lifetime));
      };
      if (cfg.quantity == Quantity::two_qubit_resources) {
        const auto s = resource_time_series(cfg.ewl, traj);
        add("concurrence", s.concurrence);
        add("discord", s.discord);
        add("zeta2", s.zeta2);
      } else if (cfg.quantity == Quantity::qfi) {
        add("qfi", qfi(traj));
      } else {
        add("coherence", coherence(traj));
      }
      break;
    }
    case Mode::figure:
      break;
  }
  table.comments = provenance(cfg);
  for (auto& w : res.warnings) table.comments.push_back("# warning: " + w);
  write_csv(table, path);
  res.files.push_back(path);
  return res;
}

}  // namespace fmq
