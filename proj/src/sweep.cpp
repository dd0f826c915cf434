#include "fmq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace fmq {

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

const std::vector<std::string> kAxisNames{"lambda", "delta", "omega",
                                          "delta_over_omega", "r"};

struct Point {
  QubitCavityParams<double> params;
  ModulationDrive<double> drive;
  EWLParams<double> ewl;
};

Point resolve(const SweepSpec& spec, const std::vector<double>& coords) {
  Point pt{spec.params, spec.drive, spec.ewl};
  std::optional<double> ratio = spec.delta_over_omega;
  bool delta_axis = false;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    const std::string& name = spec.axes[a].name;
    const double v = coords[a];
    if (name == "lambda") pt.params.lambda = v;
    else if (name == "delta") pt.drive.delta = v, delta_axis = true;
    else if (name == "omega") pt.drive.omega_m = v;
    else if (name == "delta_over_omega") ratio = v;
    else if (name == "r") pt.ewl.r = v;
  }
  if (ratio && !delta_axis) pt.drive.delta = *ratio * pt.drive.omega_m;
  return pt;
}

std::vector<double> evaluate(const SweepSpec& spec, const Point& pt) {
  if (spec.quantity == Quantity::non_markovianity) {
    const auto r = non_markovianity(pt.params, pt.drive, spec.nm);
    return {r.value, r.truncation_time, r.final_amplitude};
  }
  const auto traj = solve_amplitude(pt.params, pt.drive, spec.solver);
  const double eps = spec.lifetime_threshold;
  const double t_end = traj.times[traj.size() - 1];
  switch (spec.quantity) {
    case Quantity::coherence: {
      const Eigen::VectorXd z = coherence(traj);
      return {lifetime(traj.times, z, eps).lifetime, z[z.size() - 1]};
    }
    case Quantity::qfi: {
      const Eigen::VectorXd f = qfi(traj);
      return {lifetime(traj.times, f, eps).lifetime, f[f.size() - 1]};
    }
    case Quantity::gamma_t: {
      const auto rates = decay_rate(traj);
      double lo = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < rates.gamma_t.size(); ++k)
        if (rates.valid[k]) lo = std::min(lo, rates.gamma_t[k]);
      double late = std::numeric_limits<double>::quiet_NaN();
      try {
        late = mean_decay_rate(rates, 0.9 * t_end, t_end);
      } catch (const std::invalid_argument&) {
      }
      return {late, lo};
    }
    case Quantity::two_qubit_resources: {
      const auto s = resource_time_series(pt.ewl, traj);
      return {lifetime(s.times, s.concurrence, eps).lifetime,
              lifetime(s.times, s.discord, eps).lifetime,
              lifetime(s.times, s.zeta2, eps).lifetime};
    }
    default:
      break;
  }
  throw std::logic_error("unhandled quantity");
}

}  // namespace

double default_horizon(const QubitCavityParams<double>& p) {
  return p.strong_coupling() ? kStrongCouplingHorizon : kWeakCouplingHorizon;
}

LifetimeResult lifetime(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                        double epsilon, double horizon) {
  if (times.size() == 0) throw std::invalid_argument("lifetime: empty series");
  if (times.size() != values.size())
    throw std::invalid_argument("lifetime: times and values differ in length");
  if (!(epsilon > 0)) throw std::invalid_argument("lifetime: epsilon must be > 0");

  Eigen::Index n = times.size();
  if (horizon > 0)
    while (n > 1 && times[n - 1] > horizon) --n;
  LifetimeResult res;
  res.horizon = horizon > 0 ? horizon : times[n - 1];

  auto above = [&](Eigen::Index k) { return values[k] >= epsilon; };
  Eigen::Index last = -1;
  for (Eigen::Index k = n - 1; k >= 0; --k)
    if (above(k)) {
      last = k;
      break;
    }
  if (last == n - 1) return res;
  res.beyond_horizon = false;
  if (last < 0) {
    res.lifetime = times[0];
    return res;
  }
  const double v0 = values[last], v1 = values[last + 1];
  const double t0 = times[last], t1 = times[last + 1];
  const double frac = std::isnan(v1) || v0 == v1 ? 0.0 : (v0 - epsilon) / (v0 - v1);
  res.lifetime = t0 + std::clamp(frac, 0.0, 1.0) * (t1 - t0);
  return res;
}

std::vector<NmPoint> nm_curve(const QubitCavityParams<double>& p, DeltaRule rule,
                              const std::vector<double>& omega_values,
                              const NonMarkovianityOptions& opt, unsigned threads) {
  for (std::size_t i = 0; i < omega_values.size(); ++i) {
    if (!(omega_values[i] > 0))
      throw std::invalid_argument("nm_curve: Omega values must be positive");
    if (i > 0 && !(omega_values[i] > omega_values[i - 1]))
      throw std::invalid_argument("nm_curve: Omega values must be sorted");
  }
  std::vector<NmPoint> out(omega_values.size());
  std::vector<std::exception_ptr> errors(omega_values.size());
  parallel_for(omega_values.size(), threads, [&](std::size_t i) {
    try {
      const double w = omega_values[i];
      out[i].omega = w;
      out[i].delta = rule.delta(w);
      out[i].result = non_markovianity(p, ModulationDrive<double>{out[i].delta, w}, opt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::coherence: return "coherence";
    case Quantity::qfi: return "qfi";
    case Quantity::gamma_t: return "gamma_t";
    case Quantity::non_markovianity: return "non_markovianity";
    case Quantity::two_qubit_resources: return "two_qubit_resources";
  }
  return "?";
}

Quantity parse_quantity(const std::string& s) {
  for (Quantity q : {Quantity::coherence, Quantity::qfi, Quantity::gamma_t,
                     Quantity::non_markovianity, Quantity::two_qubit_resources})
    if (to_string(q) == s) return q;
  throw std::invalid_argument(
      "unknown quantity '" + s +
      "' (coherence, qfi, gamma_t, non_markovianity, two_qubit_resources)");
}

std::vector<std::string> value_names(Quantity q) {
  switch (q) {
    case Quantity::coherence: return {"lifetime", "final_coherence"};
    case Quantity::qfi: return {"lifetime", "final_qfi"};
    case Quantity::gamma_t: return {"late_mean_gamma", "min_gamma"};
    case Quantity::non_markovianity: return {"N", "truncation_time", "final_amplitude"};
    case Quantity::two_qubit_resources:
      return {"lifetime_concurrence", "lifetime_discord", "lifetime_zeta2"};
  }
  return {};
}

Axis Axis::linear(std::string name, double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("axis '" + name + "': need at least one value");
  Axis a{std::move(name), {}};
  for (int i = 0; i < n; ++i)
    a.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return a;
}

Axis Axis::log(std::string name, double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > 0))
    throw std::invalid_argument("axis '" + name + "': log range needs positive bounds");
  Axis a = linear(std::move(name), std::log10(lo), std::log10(hi), n);
  for (double& v : a.values) v = std::pow(10.0, v);
  a.values.front() = lo;
  if (n > 1) a.values.back() = hi;
  return a;
}

void SweepSpec::validate() const {
  if (axes.empty()) throw std::invalid_argument("sweep: at least one axis required");
  for (const Axis& a : axes) {
    if (std::find(kAxisNames.begin(), kAxisNames.end(), a.name) == kAxisNames.end())
      throw std::invalid_argument("sweep: unknown axis '" + a.name + "'");
    if (a.values.empty())
      throw std::invalid_argument("sweep: axis '" + a.name + "' has no values");
    for (double v : a.values) {
      const bool ok = a.name == "r" ? (v >= 0 && v <= 1)
                      : a.name == "lambda" ? v > 0
                                           : v >= 0;
      if (!ok)
        throw std::invalid_argument("sweep: axis '" + a.name + "' value " +
                                    std::to_string(v) + " out of range");
    }
  }
  params.validate();
  drive.validate();
  if (quantity == Quantity::two_qubit_resources) ewl.validate();
  if (!(lifetime_threshold > 0))
    throw std::invalid_argument("sweep: lifetime threshold must be > 0");
}

std::size_t SweepSpec::size() const {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= a.values.size();
  return n;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  for (const Axis& a : spec.axes) table.axis_names.push_back(a.name);
  table.value_names = value_names(spec.quantity);

  const std::size_t n = spec.size();
  table.rows.resize(n);
  parallel_for(n, spec.threads, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.index = i;
    row.point.resize(spec.axes.size());
    std::size_t rest = i;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& vals = spec.axes[a].values;
      row.point[a] = vals[rest % vals.size()];
      rest /= vals.size();
    }
    try {
      row.values = evaluate(spec, resolve(spec, row.point));
    } catch (const std::exception& e) {
      row.values.assign(table.value_names.size(), std::numeric_limits<double>::quiet_NaN());
      row.error = e.what();
    }
  });
  return table;
}

}  // namespace fmq
