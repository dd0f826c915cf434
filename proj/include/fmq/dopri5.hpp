// Adaptive Dormand-Prince 5(4) integrator with a 4th-order continuous
// extension. Templated on the state vector (any fixed-size Eigen vector) so
// the same stepper serves real and complex systems.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace fmq {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double dt_max = 0.1;
  // Steps shorter than dt_max * min_step_ratio abort the integration.
  double min_step_ratio = 1e-9;
  long max_steps = 2'000'000'000L;
};

/// Continuous extension of one accepted step, valid on [t0, t0 + h].
template <typename State>
class DenseStep {
 public:
  using Scalar = typename Eigen::NumTraits<typename State::Scalar>::Real;

  Scalar t0{};
  Scalar h{};
  State r1, r2, r3, r4, r5;

  Scalar t1() const { return t0 + h; }

  State operator()(Scalar t) const {
    const Scalar theta = (t - t0) / h;
    const Scalar theta1 = Scalar(1) - theta;
    return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
};

/// Integrates dy/dt = rhs(t, y) from t_begin to t_end.
///
/// `on_step(const DenseStep&, const State& y1, const State& f1)` is called for
/// every accepted step; returning false stops the integration early. The
/// final step is clamped to land exactly on t_end. Returns the time reached.
template <typename State, typename Rhs, typename OnStep>
typename DenseStep<State>::Scalar integrate_dopri5(
    Rhs&& rhs, State y, typename DenseStep<State>::Scalar t_begin,
    typename DenseStep<State>::Scalar t_end, const StepControl& ctl,
    OnStep&& on_step) {
  using Scalar = typename DenseStep<State>::Scalar;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                   c5 = Scalar(8) / 9;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15,
                   a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                   a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                   a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                   a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113,
                   a74 = Scalar(125) / 192, a75 = Scalar(-2187) / 6784,
                   a76 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                   e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                   e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  constexpr Scalar d1 = Scalar(-12715105075.0L) / Scalar(11282082432.0L),
                   d3 = Scalar(87487479700.0L) / Scalar(32700410799.0L),
                   d4 = Scalar(-10690763975.0L) / Scalar(1880347072.0L),
                   d5 = Scalar(701980252875.0L) / Scalar(199316789632.0L),
                   d6 = Scalar(-1453857185.0L) / Scalar(822651844.0L),
                   d7 = Scalar(69997945.0L) / Scalar(29380423.0L);

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (!(ctl.rel_tol > 0) || !(ctl.abs_tol > 0))
    throw SolverError("tolerances must be positive");
  if (ctl.rel_tol < 50 * eps)
    throw SolverError("rel_tol " + std::to_string(double(ctl.rel_tol)) +
                      " is not achievable in this precision");
  if (!(ctl.dt_max > 0)) throw SolverError("dt_max must be positive");
  if (!(t_end > t_begin)) return t_begin;

  const Scalar h_max = Scalar(ctl.dt_max);
  const Scalar h_min = h_max * Scalar(ctl.min_step_ratio);

  auto err_norm = [&](const State& y0, const State& y1, const State& err) {
    Scalar acc = 0;
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
      const Scalar sc = Scalar(ctl.abs_tol) +
                        Scalar(ctl.rel_tol) * max(abs(y0[i]), abs(y1[i]));
      const Scalar q = abs(err[i]) / sc;
      acc += q * q;
      ++n;
    }
    return sqrt(acc / Scalar(n));
  };

  State k1 = rhs(t_begin, y);

  // Initial step from the usual derivative-scale heuristic.
  Scalar h;
  {
    const Scalar d0 = y.norm(), d1n = k1.norm();
    h = (d0 < Scalar(1e-5) || d1n < Scalar(1e-5)) ? Scalar(1e-6)
                                                   : Scalar(0.01) * d0 / d1n;
    h = min(h, h_max);
    h = min(h, t_end - t_begin);
  }

  Scalar t = t_begin;
  long steps = 0;
  Scalar err_prev = Scalar(1e-4);
  bool last_rejected = false;
  DenseStep<State> dense;

  while (t < t_end) {
    if (++steps > ctl.max_steps)
      throw SolverError("step budget exhausted at t=" + std::to_string(double(t)));
    bool final_step = false;
    if (t + h >= t_end || t + h * Scalar(1.0001) >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    const State y2 = y + h * (a21 * k1);
    const State k2 = rhs(t + c2 * h, y2);
    const State y3 = y + h * (a31 * k1 + a32 * k2);
    const State k3 = rhs(t + c3 * h, y3);
    const State y4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    const State k4 = rhs(t + c4 * h, y4);
    const State y5 = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    const State k5 = rhs(t + c5 * h, y5);
    const State y6 =
        y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const State k6 = rhs(t + h, y6);
    const State y_new =
        y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Scalar t_new = final_step ? t_end : t + h;
    const State k7 = rhs(t_new, y_new);
    const State err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const Scalar en = err_norm(y, y_new, err);
    if (!std::isfinite(double(en)))
      throw SolverError("non-finite state at t=" + std::to_string(double(t)));

    if (en <= 1) {
      const State ydiff = y_new - y;
      const State bspl = h * k1 - ydiff;
      dense.t0 = t;
      dense.h = h;
      dense.r1 = y;
      dense.r2 = ydiff;
      dense.r3 = bspl;
      dense.r4 = ydiff - h * k7 - bspl;
      dense.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      t = t_new;
      y = y_new;
      k1 = k7;
      if (!on_step(std::as_const(dense), std::as_const(y), std::as_const(k1)))
        return t;

      // PI step-size controller (Gustafsson).
      const Scalar en_c = max(en, Scalar(1e-10));
      Scalar fac = Scalar(0.9) * pow(en_c, Scalar(-0.7) / 5) *
                   pow(err_prev, Scalar(0.4) / 5);
      fac = min(Scalar(5), max(Scalar(0.2), fac));
      if (last_rejected) fac = min(fac, Scalar(1));
      err_prev = max(en, Scalar(1e-4));
      h = min(h * fac, h_max);
      last_rejected = false;
    } else {
      const Scalar fac = max(Scalar(0.2), Scalar(0.9) * pow(en, Scalar(-0.2)));
      h *= fac;
      last_rejected = true;
    }
    if (t < t_end && h < h_min)
      throw SolverError("step size underflow (h=" + std::to_string(double(h)) +
                        ") at t=" + std::to_string(double(t)));
  }
  return t;
}

}  // namespace fmq
