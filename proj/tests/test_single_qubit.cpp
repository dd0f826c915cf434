#include <doctest.h>

#include "fmq/single_qubit.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

using namespace fmq;
using P = QubitCavityParams<double>;
using D = ModulationDrive<double>;
using Cfg = SolverConfig<double>;

namespace {

P cavity(double lambda) {
  P p;
  p.lambda = lambda;
  return p;
}

AmplitudeTrajectory<double> run(double lambda, D drive, double t_max, double sample_dt = 0) {
  Cfg cfg;
  cfg.t_max = t_max;
  cfg.sample_dt = sample_dt;
  return solve_amplitude(cavity(lambda), drive, cfg);
}

// Brute-force measure: trapezoid of max(0, -Gamma)|C|/2 on a fine uniform grid.
double nm_by_quadrature(const AmplitudeTrajectory<double>& traj) {
  const auto rates = decay_rate(traj);
  double acc = 0;
  auto f = [&](Eigen::Index k) {
    if (!rates.valid[k] || rates.gamma_t[k] >= 0) return 0.0;
    return -rates.gamma_t[k] * std::abs(traj.amplitudes[k]) / 2;
  };
  for (Eigen::Index k = 0; k + 1 < traj.size(); ++k)
    acc += (traj.times[k + 1] - traj.times[k]) * (f(k) + f(k + 1)) / 2;
  return acc;
}

}  // namespace

TEST_CASE("initial superposition normalization") {
  InitialSuperposition<double> ok;
  CHECK_NOTHROW(ok.validate());
  InitialSuperposition<double> bad{{0.8, 0}, {0.8, 0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("density matrix") {
  const auto traj = run(3, D{}, 20);
  const InitialSuperposition<double> plus;

  const auto rho0 = density_matrix(traj, plus, 0.0);
  CHECK(rho0(0, 0).real() == doctest::Approx(0.5));
  CHECK(rho0(1, 1).real() == doctest::Approx(0.5));
  CHECK(std::abs(rho0(0, 1) - 0.5) < 1e-15);

  // 0.690295428... / 2 from the closed form
  const auto rho1 = density_matrix(traj, plus, 1.0);
  CHECK(std::abs(rho1(0, 1)) == doctest::Approx(0.345147714063103776).epsilon(1e-8));

  const auto rho_end = density_matrix(traj, plus, 20.0);
  CHECK(std::abs(rho_end(0, 0)) < 1e-10);
  CHECK(rho_end(1, 1).real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(rho_end(0, 1)) < 1e-5);

  CHECK_THROWS_AS(density_matrix(traj, plus, 21.0), std::out_of_range);

  SUBCASE("trace one, Hermitian, spectrum in [0, 1]") {
    const auto dtraj = run(0.01, D{12.02415, 5}, 200);
    const InitialSuperposition<double> skew{{0.6, 0}, {0, 0.8}};
    for (Eigen::Index k = 0; k < dtraj.size(); k += 3) {
      const auto rho = density_matrix(dtraj, skew, dtraj.times[k]);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
      CHECK((rho - rho.adjoint()).norm() < 1e-15);
      const Eigen::SelfAdjointEigenSolver<Matrix2c<double>> es(rho);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      CHECK(es.eigenvalues().maxCoeff() <= 1 + 1e-10);
    }
  }
}

TEST_CASE("coherence, QFI and phase error identities") {
  const auto traj = run(0.01, D{12.02415, 5}, 300);
  const auto z = coherence(traj);
  const auto f = qfi(traj);
  const auto err = phase_error(traj);
  CHECK(z[0] == 1.0);
  CHECK(f[0] == 1.0);
  CHECK(err[0] == 1.0);
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    CHECK(f[k] == z[k] * z[k]);
    CHECK(std::abs(err[k] * std::sqrt(f[k]) - 1) <= 2 * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("phase error sentinel and arithmetic") {
  AmplitudeTrajectory<double> traj;
  traj.times = Eigen::Vector3d(0, 1, 2);
  traj.amplitudes.resize(3);
  traj.amplitudes << 1.0, std::complex<double>(0, 0.5), 0.0;
  traj.derivatives = VectorXc<double>::Zero(3);
  const auto err = phase_error(traj);
  CHECK(err[1] == 2.0);
  CHECK(std::isinf(err[2]));
}

TEST_CASE("coherence lifetimes read off the series") {
  SUBCASE("weak coupling undriven: gone near gamma t ~ 10") {
    const auto traj = run(3, D{}, 30, 0.01);
    const auto z = coherence(traj);
    Eigen::Index first = -1;
    for (Eigen::Index k = 0; k < z.size(); ++k)
      if (z[k] < 0.01) {
        first = k;
        break;
      }
    REQUIRE(first > 0);
    CHECK(traj.times[first] > 5);
    CHECK(traj.times[first] < 15);
  }
  SUBCASE("strong coupling undriven: oscillatory, gone near gamma t ~ 1000") {
    const auto traj = run(0.01, D{}, 3000, 0.5);
    const auto z = coherence(traj);
    CHECK(z.tail(100).maxCoeff() < 0.01);
    CHECK(z.segment(100, 200).maxCoeff() > 0.3);
  }
}

TEST_CASE("QFI protection grows with Omega at the J0 zero") {
  double prev = -1;
  for (double omega : {0.05, 0.2, 0.5, 5.0}) {
    const auto traj = run(0.01, D{bessel_zero_amplitude(0, omega), omega}, 2000, 1.0);
    const double f_end = qfi(traj)[traj.size() - 1];
    CHECK(f_end > prev);
    prev = f_end;
  }
  CHECK(prev > 0.99);
}

TEST_CASE("decay rate") {
  SUBCASE("Markovian limit") {
    const auto traj = run(100, D{}, 3, 0.5);
    const auto rates = decay_rate(traj);
    // mpmath on the closed form: Gamma(2) = 1.00505063...
    const Eigen::Index k = 4;
    REQUIRE(traj.times[k] == 2.0);
    CHECK(rates.gamma_t[k] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rates.gamma_t[k] == doctest::Approx(1.00505063388334658).epsilon(1e-3));
  }
  SUBCASE("overdamped regime never goes negative") {
    const auto traj = run(3, D{}, 40, 0.005);
    const auto rates = decay_rate(traj);
    for (Eigen::Index k = 0; k < traj.size(); ++k)
      if (rates.valid[k]) CHECK(rates.gamma_t[k] >= -1e-9);
  }
  SUBCASE("masked below the guard") {
    AmplitudeTrajectory<double> traj;
    traj.times = Eigen::Vector2d(0, 1);
    traj.amplitudes.resize(2);
    traj.amplitudes << 1.0, 1e-9;
    traj.derivatives.resize(2);
    traj.derivatives << 0.0, -1e-9;
    const auto rates = decay_rate(traj);
    CHECK(rates.valid[0]);
    CHECK_FALSE(rates.valid[1]);
    CHECK(std::isnan(rates.gamma_t[1]));
  }
  SUBCASE("optimal drive inhibits Gamma") {
    const auto on = run(0.01, D{12.02415, 5}, 2000, 0.01);
    const double g_on = std::abs(mean_decay_rate(decay_rate(on), 1500.0, 2000.0));
    // The undriven envelope decays at lambda = 1e-2.
    CHECK(g_on < 1e-3);
    CHECK(g_on < 0.01 * 0.01);
  }
}

TEST_CASE("signed decay-rate integral equals 2(1 - |C|)") {
  for (D drive : {D{}, D{10, 0.5}, D{10, 2}}) {
    const auto traj = run(3, drive, 10, 0.001);
    const auto rates = decay_rate(traj);
    double acc = 0;
    for (Eigen::Index k = 0; k + 1 < traj.size(); ++k) {
      const double fa = rates.gamma_t[k] * std::abs(traj.amplitudes[k]);
      const double fb = rates.gamma_t[k + 1] * std::abs(traj.amplitudes[k + 1]);
      acc += (traj.times[k + 1] - traj.times[k]) * (fa + fb) / 2;
    }
    CHECK(acc == doctest::Approx(2 * (1 - std::abs(traj.amplitudes[traj.size() - 1]))).epsilon(1e-6));
  }
}

TEST_CASE("non-Markovianity") {
  NonMarkovianityOptions opt;
  opt.horizon = 500;

  SUBCASE("overdamped undriven: zero") {
    const auto r = non_markovianity(cavity(3), D{}, opt);
    CHECK(r.value == 0.0);
    CHECK(r.negative_intervals.empty());
    CHECK(r.final_amplitude < 1e-4);
  }
  SUBCASE("weak coupling, slow modulation: zero") {
    const auto r = non_markovianity(cavity(3), D{10, 0.05}, opt);
    CHECK(r.value < 1e-6);
  }
  SUBCASE("weak coupling, fast enough modulation: positive and matches quadrature") {
    const auto r = non_markovianity(cavity(3), D{10, 2}, opt);
    CHECK(r.value > 0);
    const auto traj = run(3, D{10, 2}, r.truncation_time, 1e-4);
    CHECK(r.value == doctest::Approx(nm_by_quadrature(traj)).epsilon(1e-4));
    // SciPy DOP853 + trapezoid prototype gave 0.05975
    CHECK(r.value == doctest::Approx(0.05975).epsilon(2e-3));
    for (std::size_t i = 0; i < r.negative_intervals.size(); ++i) {
      CHECK(r.negative_intervals[i].first < r.negative_intervals[i].second);
      if (i > 0) CHECK(r.negative_intervals[i - 1].second <= r.negative_intervals[i].first);
    }
  }
  SUBCASE("strong coupling undriven: total |C| revival from the closed form") {
    opt.horizon = 5000;
    const auto r = non_markovianity(cavity(0.01), D{}, opt);
    // |C| rises from each node to the next maximum at t = 2 pi k / w,
    // w^2 = 2 lambda - lambda^2, so N is the sum of those 17 maxima (mpmath).
    CHECK(r.truncation_time == doctest::Approx(780.4111).epsilon(1e-5));
    CHECK(r.value == doctest::Approx(3.91790446016891436).epsilon(1e-6));
    CHECK(r.negative_intervals.size() == 17);
  }
  SUBCASE("horizon too short") {
    opt.horizon = 2;
    CHECK_THROWS_AS(non_markovianity(cavity(3), D{10, 2}, opt), HorizonError);
    opt.forced = true;
    const auto r = non_markovianity(cavity(3), D{10, 2}, opt);
    CHECK(r.truncation_time == 2.0);
    CHECK(r.value >= 0);
  }
}
