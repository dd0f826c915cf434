// Single-qubit resources derived from the excited-state amplitude.
#pragma once

#include "fmq/dynamics.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fmq {

template <typename Scalar>
struct InitialSuperposition {
  std::complex<Scalar> alpha{Scalar(1) / std::numbers::sqrt2_v<Scalar>};
  std::complex<Scalar> beta{Scalar(1) / std::numbers::sqrt2_v<Scalar>};

  void validate() const {
    const Scalar norm = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm - 1) > Scalar(1e-12))
      throw std::invalid_argument("|alpha|^2 + |beta|^2 = " +
                                  std::to_string(double(norm)) + " != 1");
  }
};

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Reduced qubit state in the {|e>, |g>} basis at time t.
template <typename Scalar>
Matrix2c<Scalar> density_matrix(const AmplitudeTrajectory<Scalar>& traj,
                                 const InitialSuperposition<Scalar>& init,
                                 Scalar t) {
  init.validate();
  const std::complex<Scalar> c = traj.amplitude_at(t);
  const Scalar pe = std::norm(init.alpha) * std::norm(c);
  Matrix2c<Scalar> rho;
  rho(0, 0) = pe;
  rho(0, 1) = init.alpha * std::conj(init.beta) * c;
  rho(1, 0) = std::conj(rho(0, 1));
  rho(1, 1) = Scalar(1) - pe;
  return rho;
}

/// l1 coherence for alpha = beta = 1/sqrt(2): zeta(t) = |C_e(t)|.
template <typename Scalar>
VectorX<Scalar> coherence(const AmplitudeTrajectory<Scalar>& traj) {
  return traj.amplitudes.cwiseAbs();
}

/// Phase QFI, the coherence squared.
template <typename Scalar>
VectorX<Scalar> qfi(const AmplitudeTrajectory<Scalar>& traj) {
  return coherence(traj).array().square().matrix();
}

/// Cramer-Rao limited phase error 1/|C_e|; +inf where the amplitude vanishes.
template <typename Scalar>
VectorX<Scalar> phase_error(const AmplitudeTrajectory<Scalar>& traj) {
  const VectorX<Scalar> z = coherence(traj);
  return z.unaryExpr([](Scalar v) {
    return v > 0 ? Scalar(1) / v : std::numeric_limits<Scalar>::infinity();
  });
}

template <typename Scalar>
struct DecayRateSeries {
  VectorX<Scalar> times;
  VectorX<Scalar> gamma_t;     // NaN where masked
  VectorX<Scalar> lamb_shift;  // NaN where masked
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
};

inline constexpr double kDecayRateGuard = 1e-8;

/// Gamma(t) = -2 Re[C'/C], Omega(t) = -2 Im[C'/C]; masked where |C| <= guard.
template <typename Scalar>
DecayRateSeries<Scalar> decay_rate(const AmplitudeTrajectory<Scalar>& traj,
                                   Scalar guard = Scalar(kDecayRateGuard)) {
  const Eigen::Index n = traj.size();
  DecayRateSeries<Scalar> out;
  out.times = traj.times;
  out.gamma_t.resize(n);
  out.lamb_shift.resize(n);
  out.valid.resize(n);
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto c = traj.amplitudes[k];
    if (std::abs(c) <= guard) {
      out.valid[k] = false;
      out.gamma_t[k] = nan;
      out.lamb_shift[k] = nan;
      continue;
    }
    const auto ratio = traj.derivatives[k] / c;
    out.valid[k] = true;
    out.gamma_t[k] = -2 * ratio.real();
    out.lamb_shift[k] = -2 * ratio.imag();
  }
  return out;
}

/// Time average of Gamma over [t_a, t_b] by the trapezoidal rule on valid
/// samples.
template <typename Scalar>
Scalar mean_decay_rate(const DecayRateSeries<Scalar>& s, Scalar t_a, Scalar t_b) {
  Scalar acc = 0, span = 0;
  for (Eigen::Index k = 0; k + 1 < s.times.size(); ++k) {
    if (s.times[k] < t_a || s.times[k + 1] > t_b) continue;
    if (!s.valid[k] || !s.valid[k + 1]) continue;
    const Scalar h = s.times[k + 1] - s.times[k];
    acc += h * (s.gamma_t[k] + s.gamma_t[k + 1]) / 2;
    span += h;
  }
  if (!(span > 0)) throw std::invalid_argument("no valid samples in window");
  return acc / span;
}

struct NonMarkovianityOptions {
  // Integration stops once |C_e| drops below this value.
  double truncate_below = 1e-4;
  // Upper bound on the integration time.
  double horizon = 1e3;
  // Accept a horizon at which |C_e| is still above truncate_below.
  bool forced = false;
  double guard = kDecayRateGuard;
  double root_tol = 1e-6;
  // Gamma sign is probed at this many equally spaced points per step.
  int probes_per_step = 4;
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double dt_max = 0;  // 0: automatic bound
};

template <typename Scalar>
struct NonMarkovianityResult {
  Scalar value = 0;
  std::vector<std::pair<Scalar, Scalar>> negative_intervals;
  Scalar truncation_time = 0;
  Scalar final_amplitude = 1;  // |C_e| at truncation_time
};

class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Information-backflow measure N = -(1/2) * integral over {Gamma < 0} of
/// Gamma |C_e| dt for the optimal orthogonal pair (|e> +- |g>)/sqrt(2).
///
/// Since d|C_e|/dt = -(Gamma/2)|C_e|, each negative interval [a, b]
/// contributes |C_e(b)| - |C_e(a)| exactly; the interval ends are located on
/// the dense solver output by bisection.
template <typename Scalar>
NonMarkovianityResult<Scalar> non_markovianity(
    const QubitCavityParams<Scalar>& p, const ModulationDrive<Scalar>& d,
    const NonMarkovianityOptions& opt = {}) {
  using State = typename AmplitudeRhs<Scalar>::State;
  const AmplitudeRhs<Scalar> rhs{p, d};
  SolverConfig<Scalar> cfg;
  cfg.t_max = Scalar(opt.horizon);
  cfg.rel_tol = Scalar(opt.rel_tol);
  cfg.abs_tol = Scalar(opt.abs_tol);
  cfg.dt_max = Scalar(opt.dt_max);
  const Scalar guard = Scalar(opt.guard);

  auto negative_at = [&](Scalar t, const State& y) {
    const Scalar mag = std::abs(y[0]);
    if (mag <= guard) return false;
    return (rhs.amplitude_derivative(t, y) / y[0]).real() > 0;
  };

  NonMarkovianityResult<Scalar> res;
  bool in_negative = false;
  Scalar start_t = 0, start_mag = 1;
  bool prev_negative = false;
  Scalar prev_t = 0;
  bool truncated = false;

  auto close_interval = [&](Scalar t, Scalar mag) {
    res.value += std::max(Scalar(0), mag - start_mag);
    res.negative_intervals.emplace_back(start_t, t);
    in_negative = false;
  };

  integrate_amplitude(p, d, cfg, [&](const DenseStep<State>& step,
                                     const State& y1, const State&) {
    const int probes = std::max(1, opt.probes_per_step);
    for (int k = 1; k <= probes; ++k) {
      const Scalar t = k == probes ? step.t1()
                                   : step.t0 + step.h * Scalar(k) / Scalar(probes);
      const State y = k == probes ? y1 : step(t);
      const bool neg = negative_at(t, y);
      if (neg != prev_negative) {
        Scalar lo = prev_t, hi = t;
        while (hi - lo > Scalar(opt.root_tol)) {
          const Scalar mid = (lo + hi) / 2;
          if (negative_at(mid, step(mid)) == prev_negative)
            lo = mid;
          else
            hi = mid;
        }
        const Scalar root = (lo + hi) / 2;
        const Scalar mag = std::abs(step(root)[0]);
        if (neg) {
          in_negative = true;
          start_t = root;
          start_mag = mag;
        } else if (in_negative) {
          close_interval(root, mag);
        }
      }
      prev_negative = neg;
      prev_t = t;
    }
    const Scalar mag1 = std::abs(y1[0]);
    if (mag1 < Scalar(opt.truncate_below)) {
      truncated = true;
      res.truncation_time = step.t1();
      res.final_amplitude = mag1;
      return false;
    }
    res.truncation_time = step.t1();
    res.final_amplitude = mag1;
    return true;
  });

  if (in_negative) close_interval(res.truncation_time, res.final_amplitude);
  if (!truncated && !opt.forced)
    throw HorizonError("horizon " + std::to_string(opt.horizon) +
                       " reached with |C_e| = " +
                       std::to_string(double(res.final_amplitude)) +
                       " >= " + std::to_string(opt.truncate_below) +
                       "; increase the horizon or force it");
  return res;
}

}  // namespace fmq
