// Excited-state amplitude of a frequency-modulated qubit in a Lorentzian
// cavity. All rates are in units of the spontaneous-emission rate gamma and
// all times are scaled times gamma*t.
#pragma once

#include "fmq/dopri5.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmq {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using VectorXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
struct QubitCavityParams {
  Scalar gamma = 1;
  Scalar lambda = 1;
  // Carrier frequency; only used for the adiabatic-regime check.
  std::optional<Scalar> omega0;

  bool strong_coupling() const { return lambda < gamma; }
  bool weak_coupling() const { return lambda > gamma; }

  void validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    if (omega0 && !(*omega0 > 0))
      throw std::invalid_argument("omega0 must be > 0");
  }
};

template <typename Scalar>
struct ModulationDrive {
  Scalar delta = 0;    // modulation amplitude
  Scalar omega_m = 0;  // modulation frequency

  bool enabled() const { return delta != 0; }

  void validate() const {
    if (!(delta >= 0)) throw std::invalid_argument("delta must be >= 0");
    if (!(omega_m >= 0)) throw std::invalid_argument("omega must be >= 0");
  }
};

enum class Backend { ode_reduction, volterra_quadrature };

template <typename Scalar>
struct SolverConfig {
  Scalar t_max = 50;
  // Maximum step (ODE) or uniform grid step (Volterra). Non-positive selects
  // min(1/lambda, 2*pi/Omega) / 10.
  Scalar dt_max = 0;
  Scalar rel_tol = 1e-9;
  Scalar abs_tol = 1e-9;
  Backend backend = Backend::ode_reduction;
  // Output spacing for the ODE backend; 0 records every accepted step.
  Scalar sample_dt = 0;
  // Volterra backend: combine grids h and h/2 to cancel the O(h^2) term.
  bool richardson = true;
};

template <typename Scalar>
Scalar dt_max_bound(const QubitCavityParams<Scalar>& p,
                    const ModulationDrive<Scalar>& d) {
  Scalar bound = Scalar(1) / p.lambda;
  if (d.omega_m > 0)
    bound = std::min(bound, Scalar(2) * std::numbers::pi_v<Scalar> / d.omega_m);
  return bound / 10;
}

template <typename Scalar>
Scalar resolved_dt_max(const QubitCavityParams<Scalar>& p,
                       const ModulationDrive<Scalar>& d,
                       const SolverConfig<Scalar>& c) {
  return c.dt_max > 0 ? c.dt_max : dt_max_bound(p, d);
}

template <typename Scalar>
void validate(const QubitCavityParams<Scalar>& p,
              const ModulationDrive<Scalar>& d, const SolverConfig<Scalar>& c) {
  p.validate();
  d.validate();
  if (!(c.t_max > 0)) throw std::invalid_argument("t_max must be > 0");
  if (!(c.rel_tol > 0) || !(c.abs_tol > 0))
    throw std::invalid_argument("tolerances must be > 0");
  if (c.sample_dt < 0) throw std::invalid_argument("sample_dt must be >= 0");
  if (c.dt_max > 0 && d.omega_m > 0 &&
      c.dt_max > dt_max_bound(p, d) * (1 + Scalar(1e-12)))
    throw std::invalid_argument(
        "dt_max " + std::to_string(double(c.dt_max)) +
        " exceeds min(1/lambda, 2pi/Omega)/10 = " +
        std::to_string(double(dt_max_bound(p, d))));
}

/// Validity of the fixed-coupling model needs delta, Omega << omega0.
template <typename Scalar>
std::vector<std::string> adiabatic_warnings(const QubitCavityParams<Scalar>& p,
                                            const ModulationDrive<Scalar>& d) {
  std::vector<std::string> out;
  if (!p.omega0) return out;
  if (d.delta / *p.omega0 > Scalar(0.1))
    out.push_back("delta/omega0 = " + std::to_string(double(d.delta / *p.omega0)) +
                  " > 0.1: outside the adiabatic regime");
  if (d.omega_m / *p.omega0 > Scalar(0.1))
    out.push_back("Omega/omega0 = " +
                  std::to_string(double(d.omega_m / *p.omega0)) +
                  " > 0.1: outside the adiabatic regime");
  return out;
}

/// Accumulated phase (delta/Omega) sin(Omega t); delta*t when Omega = 0.
template <typename Scalar>
Scalar modulation_phase(const ModulationDrive<Scalar>& d, Scalar t) {
  if (d.delta == 0) return Scalar(0);
  if (d.omega_m == 0) return d.delta * t;
  return d.delta / d.omega_m * std::sin(d.omega_m * t);
}

/// First positive zeros j_{n,1} of J_n, n = 0..3, to the quoted precision.
inline constexpr double kBesselFirstZeros[4] = {2.40483, 3.83170, 5.13562,
                                                6.38016};

/// Modulation amplitude delta = j_{n,1} * Omega that zeroes J_n(delta/Omega).
template <typename Scalar>
Scalar bessel_zero_amplitude(int order, Scalar omega_m) {
  if (order < 0 || order > 3)
    throw std::invalid_argument("Bessel order " + std::to_string(order) +
                                " unsupported (0..3)");
  if (!(omega_m > 0)) throw std::invalid_argument("omega must be > 0");
  return Scalar(kBesselFirstZeros[order]) * omega_m;
}

namespace detail {

// sinh(x)/x and sin(x)/x, accurate near 0.
template <typename Scalar>
Scalar sinhc(Scalar x) {
  if (std::abs(x) < Scalar(1e-4)) return 1 + x * x / 6;
  return std::sinh(x) / x;
}
template <typename Scalar>
Scalar sinc(Scalar x) {
  if (std::abs(x) < Scalar(1e-4)) return 1 - x * x / 6;
  return std::sin(x) / x;
}

}  // namespace detail

/// Undriven amplitude e^{-lt/2}[cosh(Dt/2) + (l/D) sinh(Dt/2)],
/// D = sqrt(l^2 - 2 g l), continued to cos/sin when D^2 < 0.
template <typename Scalar>
std::complex<Scalar> closed_form_no_drive(const QubitCavityParams<Scalar>& p,
                                          Scalar t) {
  const Scalar l = p.lambda;
  const Scalar d2 = l * l - 2 * p.gamma * l;
  const Scalar half_t = t / 2;
  Scalar c;
  if (d2 >= 0) {
    const Scalar dd = std::sqrt(d2);
    const Scalar x = dd * half_t;
    if (x < 1) {
      c = std::exp(-l * half_t) *
          (std::cosh(x) + l * half_t * detail::sinhc(x));
    } else {
      // Exponential form avoids cosh overflow at long times.
      const Scalar ratio = l / dd;
      c = Scalar(0.5) * (1 + ratio) * std::exp((dd - l) * half_t) +
          Scalar(0.5) * (1 - ratio) * std::exp(-(dd + l) * half_t);
    }
  } else {
    const Scalar x = std::sqrt(-d2) * half_t;
    c = std::exp(-l * half_t) * (std::cos(x) + l * half_t * detail::sinc(x));
  }
  return {c, Scalar(0)};
}

/// Sampled C_e(t) with ODE-exact derivatives.
template <typename Scalar>
struct AmplitudeTrajectory {
  VectorX<Scalar> times;
  VectorXc<Scalar> amplitudes;
  VectorXc<Scalar> derivatives;
  QubitCavityParams<Scalar> params;
  ModulationDrive<Scalar> drive;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return times.size(); }
  Scalar t_begin() const { return times[0]; }
  Scalar t_end() const { return times[times.size() - 1]; }

  /// Cubic Hermite interpolation from amplitude and derivative samples.
  std::complex<Scalar> amplitude_at(Scalar t) const {
    if (size() == 0) throw std::out_of_range("empty trajectory");
    const Scalar slack = Scalar(1e-12) * std::max(Scalar(1), std::abs(t_end()));
    if (t < t_begin() - slack || t > t_end() + slack)
      throw std::out_of_range("t=" + std::to_string(double(t)) +
                              " outside trajectory range [" +
                              std::to_string(double(t_begin())) + ", " +
                              std::to_string(double(t_end())) + "]");
    const Scalar* first = times.data();
    const Scalar* last = first + size();
    auto it = std::upper_bound(first, last, t);
    Eigen::Index k = std::clamp<Eigen::Index>((it - first) - 1, 0, size() - 2);
    if (size() == 1) return amplitudes[0];
    const Scalar h = times[k + 1] - times[k];
    const Scalar s = std::clamp((t - times[k]) / h, Scalar(0), Scalar(1));
    const Scalar s2 = s * s, s3 = s2 * s;
    const Scalar h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s,
                 h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * amplitudes[k] + (h10 * h) * derivatives[k] +
           h01 * amplitudes[k + 1] + (h11 * h) * derivatives[k + 1];
  }
};

/// Right-hand side of the two-variable reduction of the memory-kernel
/// equation. The auxiliary is scaled by lambda so both components are O(1):
///   dC/dt = -(gamma/2) e^{i phi} A
///   dA/dt = -lambda A + lambda e^{-i phi} C,   A = lambda * B.
template <typename Scalar>
struct AmplitudeRhs {
  using State = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

  QubitCavityParams<Scalar> params;
  ModulationDrive<Scalar> drive;

  State operator()(Scalar t, const State& y) const {
    const Scalar phi = modulation_phase(drive, t);
    const std::complex<Scalar> rot(std::cos(phi), std::sin(phi));
    State dy;
    dy[0] = -(params.gamma / 2) * rot * y[1];
    dy[1] = -params.lambda * y[1] + params.lambda * std::conj(rot) * y[0];
    return dy;
  }

  std::complex<Scalar> amplitude_derivative(Scalar t, const State& y) const {
    const Scalar phi = modulation_phase(drive, t);
    return -(params.gamma / 2) * std::complex<Scalar>(std::cos(phi), std::sin(phi)) *
           y[1];
  }

  static State initial() { return State(std::complex<Scalar>(1), std::complex<Scalar>(0)); }
};

template <typename Scalar>
StepControl step_control(const QubitCavityParams<Scalar>& p,
                         const ModulationDrive<Scalar>& d,
                         const SolverConfig<Scalar>& c) {
  StepControl ctl;
  ctl.rel_tol = double(c.rel_tol);
  ctl.abs_tol = double(c.abs_tol);
  ctl.dt_max = double(resolved_dt_max(p, d, c));
  return ctl;
}

/// Streams the ODE solution: `on_step(dense, y1, f1)` per accepted step.
template <typename Scalar, typename OnStep>
Scalar integrate_amplitude(const QubitCavityParams<Scalar>& p,
                           const ModulationDrive<Scalar>& d,
                           const SolverConfig<Scalar>& c, OnStep&& on_step) {
  validate(p, d, c);
  const AmplitudeRhs<Scalar> rhs{p, d};
  return integrate_dopri5(rhs, AmplitudeRhs<Scalar>::initial(), Scalar(0),
                          c.t_max, step_control(p, d, c),
                          std::forward<OnStep>(on_step));
}

namespace detail {

template <typename Scalar>
AmplitudeTrajectory<Scalar> finish(std::vector<Scalar>& t,
                                   std::vector<std::complex<Scalar>>& a,
                                   std::vector<std::complex<Scalar>>& da,
                                   const QubitCavityParams<Scalar>& p,
                                   const ModulationDrive<Scalar>& d) {
  AmplitudeTrajectory<Scalar> traj;
  const auto n = static_cast<Eigen::Index>(t.size());
  traj.times = Eigen::Map<VectorX<Scalar>>(t.data(), n);
  traj.amplitudes = Eigen::Map<VectorXc<Scalar>>(a.data(), n);
  traj.derivatives = Eigen::Map<VectorXc<Scalar>>(da.data(), n);
  traj.params = p;
  traj.drive = d;
  traj.warnings = adiabatic_warnings(p, d);
  return traj;
}

}  // namespace detail

template <typename Scalar>
AmplitudeTrajectory<Scalar> solve_amplitude_volterra(
    const QubitCavityParams<Scalar>& p, const ModulationDrive<Scalar>& d,
    const SolverConfig<Scalar>& c);

/// Production backend: adaptive Dormand-Prince on the exact ODE reduction.
/// Dispatches to the quadrature oracle when the config selects it.
template <typename Scalar>
AmplitudeTrajectory<Scalar> solve_amplitude(const QubitCavityParams<Scalar>& p,
                                            const ModulationDrive<Scalar>& d,
                                            const SolverConfig<Scalar>& c) {
  if (c.backend == Backend::volterra_quadrature)
    return solve_amplitude_volterra(p, d, c);

  using State = typename AmplitudeRhs<Scalar>::State;
  const AmplitudeRhs<Scalar> rhs{p, d};
  std::vector<Scalar> ts{Scalar(0)};
  std::vector<std::complex<Scalar>> as{std::complex<Scalar>(1)};
  std::vector<std::complex<Scalar>> das{std::complex<Scalar>(0)};
  const Scalar sdt = c.sample_dt;
  long next_sample = 1;

  integrate_amplitude(p, d, c, [&](const DenseStep<State>& step, const State& y1,
                                   const State& f1) {
    if (sdt <= 0) {
      ts.push_back(step.t1());
      as.push_back(y1[0]);
      das.push_back(f1[0]);
      return true;
    }
    for (;;) {
      const Scalar ts_k = Scalar(next_sample) * sdt;
      if (ts_k > step.t1() || ts_k > c.t_max - sdt * Scalar(1e-6)) break;
      const State y = step(ts_k);
      ts.push_back(ts_k);
      as.push_back(y[0]);
      das.push_back(rhs.amplitude_derivative(ts_k, y));
      ++next_sample;
    }
    if (step.t1() >= c.t_max && ts.back() < c.t_max) {
      ts.push_back(c.t_max);
      as.push_back(y1[0]);
      das.push_back(f1[0]);
    }
    return true;
  });
  return detail::finish(ts, as, das, p, d);
}

namespace detail {

// 1 - e^{-x}(1 + x) without cancellation for small x.
template <typename Scalar>
Scalar one_minus_exp_poly(Scalar x) {
  if (x < Scalar(1e-2)) {
    Scalar term = x * x / 2, sum = 0;
    for (int k = 2; k < 12; ++k) {
      sum += term;
      term *= -x * Scalar(k) / Scalar((k - 1) * (k + 1));
    }
    return sum;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

struct VolterraGrid {
  static constexpr long kMaxPoints = 200'000;
};

// Product-trapezoidal march on a uniform grid: the memory integrand
// e^{-i phi} C is interpolated linearly and integrated exactly against the
// exponential kernel; the outer equation uses the (implicit) trapezoidal rule.
// The memory sum is evaluated directly at every step, O(N^2) overall.
template <typename Scalar>
void volterra_march(const QubitCavityParams<Scalar>& p,
                    const ModulationDrive<Scalar>& d, Scalar h, long n_steps,
                    VectorXc<Scalar>& amp, VectorXc<Scalar>& damp) {
  using C = std::complex<Scalar>;
  const Scalar lam = p.lambda;
  const Scalar g = p.gamma * lam / 2;
  const Scalar x = lam * h;
  const Scalar w_lo = one_minus_exp_poly(x) / (lam * x);
  const Scalar w_hi = -std::expm1(-x) / lam - w_lo;

  const long n = n_steps + 1;
  VectorX<Scalar> decay(n);
  for (long k = 0; k < n; ++k) decay[k] = std::exp(-x * Scalar(k));
  // Combined weight of z_{m-k} in I_m for 1 <= k < m.
  VectorX<Scalar> w(n);
  w[0] = w_hi;
  for (long k = 1; k < n; ++k) w[k] = decay[k - 1] * w_lo + decay[k] * w_hi;
  long k_cut = n;
  for (long k = 1; k < n; ++k)
    if (decay[k - 1] < Scalar(1e-22)) {
      k_cut = k;
      break;
    }

  VectorXc<Scalar> rot(n), z(n);
  for (long k = 0; k < n; ++k) {
    const Scalar phi = modulation_phase(d, h * Scalar(k));
    rot[k] = C(std::cos(phi), std::sin(phi));
  }
  amp.resize(n);
  damp.resize(n);
  amp[0] = C(1);
  damp[0] = C(0);
  z[0] = std::conj(rot[0]) * amp[0];
  C mem_prev(0);  // I_n

  for (long m = 0; m < n_steps; ++m) {
    // I_{m+1} without its z_{m+1} term.
    const long mp = m + 1;
    C rest(0);
    const long j_lo = std::max<long>(1, mp - k_cut + 1);
    for (long j = j_lo; j <= m; ++j) rest += w[mp - j] * z[j];
    if (mp - 1 < k_cut) rest += decay[mp - 1] * w_lo * z[0];

    const C rhs = amp[m] - (h / 2) * g * (rot[m] * mem_prev + rot[mp] * rest);
    amp[mp] = rhs / (Scalar(1) + (h / 2) * g * w_hi);
    z[mp] = std::conj(rot[mp]) * amp[mp];
    mem_prev = rest + w_hi * z[mp];
    damp[mp] = -g * rot[mp] * mem_prev;
  }
}

}  // namespace detail

/// Test oracle: direct quadrature of the memory-kernel equation on a uniform
/// grid of step dt_max. Work is quadratic in the number of grid points.
template <typename Scalar>
AmplitudeTrajectory<Scalar> solve_amplitude_volterra(
    const QubitCavityParams<Scalar>& p, const ModulationDrive<Scalar>& d,
    const SolverConfig<Scalar>& c) {
  p.validate();
  d.validate();
  if (!(c.t_max > 0)) throw std::invalid_argument("t_max must be > 0");
  const Scalar h = resolved_dt_max(p, d, c);
  const Scalar resolve = h * (d.delta + d.omega_m + std::sqrt(p.gamma * p.lambda / 2));
  if (resolve > Scalar(0.5))
    throw SolverError("Volterra grid too coarse: h*(delta + Omega + sqrt(gamma*lambda/2)) = " +
                      std::to_string(double(resolve)) + " > 0.5");
  const long n_steps = static_cast<long>(std::ceil(c.t_max / h - Scalar(1e-9)));
  const long fine_points = c.richardson ? 2 * n_steps + 1 : n_steps + 1;
  if (fine_points > detail::VolterraGrid::kMaxPoints)
    throw SolverError("Volterra grid of " + std::to_string(fine_points) +
                      " points exceeds the work budget of " +
                      std::to_string(detail::VolterraGrid::kMaxPoints));
  const Scalar step = c.t_max / Scalar(n_steps);

  VectorXc<Scalar> amp, damp;
  detail::volterra_march(p, d, step, n_steps, amp, damp);
  if (c.richardson) {
    VectorXc<Scalar> amp2, damp2;
    detail::volterra_march(p, d, step / 2, 2 * n_steps, amp2, damp2);
    for (long k = 0; k <= n_steps; ++k) {
      amp[k] = (Scalar(4) * amp2[2 * k] - amp[k]) / Scalar(3);
      damp[k] = (Scalar(4) * damp2[2 * k] - damp[k]) / Scalar(3);
    }
  }

  AmplitudeTrajectory<Scalar> traj;
  traj.times = VectorX<Scalar>::LinSpaced(n_steps + 1, Scalar(0), c.t_max);
  traj.amplitudes = std::move(amp);
  traj.derivatives = std::move(damp);
  traj.params = p;
  traj.drive = d;
  traj.warnings = adiabatic_warnings(p, d);
  return traj;
}

}  // namespace fmq
