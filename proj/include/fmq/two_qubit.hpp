// Two noninteracting qubits in separate cavities: extended Werner-like
// initial states, X-state propagation and the resource quantifiers.
#pragma once

#include "fmq/dynamics.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fmq {

enum class EwlKind { Psi, Phi };

/// r |B><B| + (1 - r) I/4 with |B> = mu|ee> + nu|gg> (Psi) or
/// mu|eg> + nu|ge> (Phi).
template <typename Scalar>
struct EWLParams {
  EwlKind kind = EwlKind::Psi;
  Scalar r = 1;
  std::complex<Scalar> mu{Scalar(1) / std::numbers::sqrt2_v<Scalar>};
  std::complex<Scalar> nu{Scalar(1) / std::numbers::sqrt2_v<Scalar>};

  /// nu chosen real and nonnegative.
  static EWLParams with_mu(EwlKind kind, Scalar r, std::complex<Scalar> mu) {
    const Scalar rest = std::max(Scalar(0), Scalar(1) - std::norm(mu));
    return {kind, r, mu, std::complex<Scalar>(std::sqrt(rest))};
  }

  void validate() const {
    if (!(r >= 0 && r <= 1))
      throw std::invalid_argument("r = " + std::to_string(double(r)) +
                                  " outside [0, 1]");
    const Scalar norm = std::norm(mu) + std::norm(nu);
    if (std::abs(norm - 1) > Scalar(1e-12))
      throw std::invalid_argument("|mu|^2 + |nu|^2 = " +
                                  std::to_string(double(norm)) + " != 1");
  }
};

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

/// X-structured two-qubit state in the basis |ee>, |eg>, |ge>, |gg>.
template <typename Scalar>
struct XState {
  std::array<Scalar, 4> p{Scalar(0), Scalar(0), Scalar(0), Scalar(1)};
  std::complex<Scalar> c14{};
  std::complex<Scalar> c23{};

  Scalar trace() const { return p[0] + p[1] + p[2] + p[3]; }

  Scalar purity() const {
    Scalar s = 0;
    for (Scalar v : p) s += v * v;
    return s + 2 * (std::norm(c14) + std::norm(c23));
  }

  Matrix4c<Scalar> matrix() const {
    Matrix4c<Scalar> m = Matrix4c<Scalar>::Zero();
    for (int i = 0; i < 4; ++i) m(i, i) = p[i];
    m(0, 3) = c14;
    m(3, 0) = std::conj(c14);
    m(1, 2) = c23;
    m(2, 1) = std::conj(c23);
    return m;
  }

  bool is_valid(Scalar tol = Scalar(1e-10)) const {
    for (Scalar v : p)
      if (v < -tol) return false;
    if (std::abs(trace() - 1) > tol) return false;
    if (std::norm(c14) > p[0] * p[3] + tol) return false;
    if (std::norm(c23) > p[1] * p[2] + tol) return false;
    return true;
  }
};

template <typename Scalar>
XState<Scalar> ewl_initial(const EWLParams<Scalar>& e) {
  e.validate();
  const Scalar noise = (1 - e.r) / 4;
  XState<Scalar> s;
  s.p = {noise, noise, noise, noise};
  const std::complex<Scalar> coh = e.r * e.mu * std::conj(e.nu);
  if (e.kind == EwlKind::Psi) {
    s.p[0] += e.r * std::norm(e.mu);
    s.p[3] += e.r * std::norm(e.nu);
    s.c14 = coh;
  } else {
    s.p[1] += e.r * std::norm(e.mu);
    s.p[2] += e.r * std::norm(e.nu);
    s.c23 = coh;
  }
  return s;
}

/// Local amplitude channels with amplitudes c_a, c_b on qubits A and B.
template <typename Scalar>
XState<Scalar> propagate_x_state(const XState<Scalar>& s0,
                                 std::complex<Scalar> c_a,
                                 std::complex<Scalar> c_b) {
  constexpr Scalar tol = Scalar(1e-9);
  if (std::abs(c_a) > 1 + tol || std::abs(c_b) > 1 + tol)
    throw std::invalid_argument("channel amplitude magnitude exceeds 1");
  const Scalar a = std::min(Scalar(1), std::norm(c_a));
  const Scalar b = std::min(Scalar(1), std::norm(c_b));
  XState<Scalar> s;
  s.p[0] = s0.p[0] * a * b;
  s.p[1] = s0.p[1] * a + s0.p[0] * a * (1 - b);
  s.p[2] = s0.p[2] * b + s0.p[0] * b * (1 - a);
  s.p[3] = 1 - s.p[0] - s.p[1] - s.p[2];
  s.c14 = s0.c14 * c_a * c_b;
  s.c23 = s0.c23 * c_a * std::conj(c_b);
  return s;
}

namespace detail {

inline constexpr double kClampTol = 1e-10;

template <typename Scalar>
Scalar xlog2x(Scalar x) {
  return x > 0 ? x * std::log2(x) : Scalar(0);
}

template <typename Scalar>
Scalar binary_entropy(Scalar x) {
  return -xlog2x(x) - xlog2x(Scalar(1) - x);
}

template <typename Scalar>
Scalar clamp_small_negative(Scalar v) {
  return v < Scalar(kClampTol) && v > -Scalar(kClampTol) ? std::max(v, Scalar(0))
                                                          : v;
}

}  // namespace detail

template <typename Scalar>
Scalar concurrence(const XState<Scalar>& s) {
  const Scalar l1 = std::abs(s.c14) - std::sqrt(std::max(Scalar(0), s.p[1] * s.p[2]));
  const Scalar l2 = std::abs(s.c23) - std::sqrt(std::max(Scalar(0), s.p[0] * s.p[3]));
  const Scalar c = 2 * std::max({Scalar(0), l1, l2});
  return std::min(Scalar(1), detail::clamp_small_negative(c));
}

/// Spectrum from the two 2x2 blocks of the X state.
template <typename Scalar>
std::array<Scalar, 4> x_state_eigenvalues(const XState<Scalar>& s) {
  const Scalar m14 = (s.p[0] + s.p[3]) / 2;
  const Scalar r14 = std::sqrt((s.p[0] - s.p[3]) * (s.p[0] - s.p[3]) / 4 + std::norm(s.c14));
  const Scalar m23 = (s.p[1] + s.p[2]) / 2;
  const Scalar r23 = std::sqrt((s.p[1] - s.p[2]) * (s.p[1] - s.p[2]) / 4 + std::norm(s.c23));
  return {m14 + r14, m14 - r14, m23 + r23, m23 - r23};
}

/// Closed-form X-state discord, min over the two candidate measurements on
/// qubit B; entropies in bits.
template <typename Scalar>
Scalar discord(const XState<Scalar>& s) {
  using detail::binary_entropy;
  using detail::xlog2x;
  const Scalar pb = s.p[0] + s.p[2];
  Scalar neg_joint = 0;  // sum lambda log2 lambda
  for (Scalar l : x_state_eigenvalues(s)) neg_joint += xlog2x(std::max(Scalar(0), l));

  const Scalar z = s.p[0] + s.p[1] - s.p[2] - s.p[3];
  const Scalar coh = std::abs(s.c14) + std::abs(s.c23);
  const Scalar tau = std::min(Scalar(1), (1 + std::sqrt(z * z + 4 * coh * coh)) / 2);
  const Scalar d1 = binary_entropy(tau);
  Scalar d2 = -binary_entropy(pb);
  for (Scalar v : s.p) d2 -= xlog2x(std::max(Scalar(0), v));

  const Scalar base = binary_entropy(pb) + neg_joint;
  const Scalar d = std::min(base + d1, base + d2);
  return std::max(Scalar(0), detail::clamp_small_negative(d));
}

/// l1 coherence in the computational basis.
template <typename Scalar>
Scalar coherence_l1_two(const XState<Scalar>& s) {
  return 2 * (std::abs(s.c14) + std::abs(s.c23));
}

template <typename Scalar>
struct TwoQubitSeries {
  VectorX<Scalar> times;
  VectorX<Scalar> concurrence;
  VectorX<Scalar> discord;
  VectorX<Scalar> zeta2;
};

/// Identical subsystems: both qubits see the amplitude of one trajectory.
template <typename Scalar>
TwoQubitSeries<Scalar> resource_time_series(const EWLParams<Scalar>& e,
                                            const AmplitudeTrajectory<Scalar>& traj) {
  const XState<Scalar> s0 = ewl_initial(e);
  const Eigen::Index n = traj.size();
  TwoQubitSeries<Scalar> out;
  out.times = traj.times;
  out.concurrence.resize(n);
  out.discord.resize(n);
  out.zeta2.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<Scalar> c = traj.amplitudes[k];
    // Integrator round-off may push |c| a hair above 1.
    if (std::abs(c) > 1) c /= std::abs(c);
    const XState<Scalar> s = propagate_x_state(s0, c, c);
    out.concurrence[k] = concurrence(s);
    out.discord[k] = discord(s);
    out.zeta2[k] = coherence_l1_two(s);
  }
  return out;
}

}  // namespace fmq
