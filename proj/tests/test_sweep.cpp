#include <doctest.h>

#include "fmq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace fmq;

namespace {

QubitCavityParams<double> cavity(double lambda) {
  QubitCavityParams<double> p;
  p.lambda = lambda;
  return p;
}

bool same_bits(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

TEST_CASE("lifetime on synthetic series") {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(11, 0, 10);

  SUBCASE("linear interpolation of the last down-crossing") {
    Eigen::VectorXd v(11);
    v << 1, 0.5, 0.005, 0.02, 0.03, 0.02, 0, 0, 0, 0, 0;
    const auto r = lifetime(t, v, 0.01);
    CHECK_FALSE(r.beyond_horizon);
    CHECK(r.lifetime == doctest::Approx(5.5));
    CHECK(r.horizon == 10);
    // The earlier dip below threshold is ignored.
    CHECK(r.lifetime > 2);
  }
  SUBCASE("constant series above threshold: sentinel") {
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(11, 0.5);
    const auto r = lifetime(t, v, 0.01);
    CHECK(r.beyond_horizon);
    CHECK(std::isinf(r.lifetime));
  }
  SUBCASE("never above threshold") {
    const Eigen::VectorXd v = Eigen::VectorXd::Zero(11);
    CHECK(lifetime(t, v, 0.01).lifetime == 0);
  }
  SUBCASE("horizon clips the series") {
    Eigen::VectorXd v(11);
    v << 1, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1;
    CHECK(lifetime(t, v, 0.5).beyond_horizon);
    const auto r = lifetime(t, v, 0.5, 7);
    CHECK(r.lifetime == doctest::Approx(4.5));
    CHECK(r.horizon == 7);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(lifetime(Eigen::VectorXd(), Eigen::VectorXd(), 0.01), std::invalid_argument);
    CHECK_THROWS_AS(lifetime(t, Eigen::VectorXd::Zero(11), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lifetime(t, Eigen::VectorXd::Zero(3), 0.01), std::invalid_argument);
  }
  SUBCASE("monotone in the threshold") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd v(11);
      for (auto& x : v) x = u(rng);
      v[10] = 0;
      double prev = std::numeric_limits<double>::infinity();
      for (double eps : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.95}) {
        const double l = lifetime(t, v, eps).lifetime;
        CHECK(l <= prev);
        prev = l;
      }
    }
  }
}

TEST_CASE("lifetime on physical series") {
  SolverConfig<double> cfg;
  cfg.sample_dt = 0.05;
  SUBCASE("weak coupling") {
    cfg.t_max = 100;
    const auto traj = solve_amplitude(cavity(3), {}, cfg);
    const auto r = lifetime(traj.times, coherence(traj), 0.01);
    CHECK(r.lifetime >= 5);
    CHECK(r.lifetime <= 15);
  }
  SUBCASE("strong coupling") {
    cfg.t_max = 5000;
    cfg.sample_dt = 0.5;
    const auto traj = solve_amplitude(cavity(0.01), {}, cfg);
    const auto r = lifetime(traj.times, coherence(traj), 0.01);
    CHECK(r.lifetime >= 300);
    CHECK(r.lifetime <= 3000);
  }
}

TEST_CASE("default horizons") {
  CHECK(default_horizon(cavity(3)) == 1e3);
  CHECK(default_horizon(cavity(0.01)) == 1e5);
}

TEST_CASE("nm_curve") {
  NonMarkovianityOptions opt;
  opt.horizon = 1000;
  SUBCASE("fixed delta, weak coupling: vanishes at small Omega") {
    const auto curve = nm_curve(cavity(3), DeltaRule::fixed(10), {0.05, 0.2, 1, 2}, opt);
    REQUIRE(curve.size() == 4);
    CHECK(curve[0].result.value < 1e-6);
    CHECK(curve[0].delta == 10);
    CHECK(curve[3].result.value > curve[0].result.value);
  }
  SUBCASE("ratio rule sets delta per point") {
    const auto curve = nm_curve(cavity(3), DeltaRule::ratio(2.40483), {1, 2}, opt);
    CHECK(curve[1].delta == doctest::Approx(4.80966));
  }
  SUBCASE("matches direct calls, any thread count") {
    const std::vector<double> w{0.5, 1, 2, 5};
    const auto a = nm_curve(cavity(3), DeltaRule::fixed(10), w, opt, 1);
    const auto b = nm_curve(cavity(3), DeltaRule::fixed(10), w, opt, 3);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto direct = non_markovianity(cavity(3), ModulationDrive<double>{10, w[i]}, opt);
      CHECK(a[i].result.value == direct.value);
      CHECK(b[i].result.value == direct.value);
    }
  }
  SUBCASE("larger delta dominates over a wider Omega range") {
    const std::vector<double> w{1, 2, 5, 10};
    const auto small = nm_curve(cavity(3), DeltaRule::fixed(1), w, opt);
    const auto large = nm_curve(cavity(3), DeltaRule::fixed(10), w, opt);
    double s = 0, l = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += small[i].result.value, l += large[i].result.value;
    CHECK(l > s);
  }
  SUBCASE("invalid Omega lists") {
    CHECK_THROWS_AS(nm_curve(cavity(3), DeltaRule::fixed(10), {1, 0.5}, opt), std::invalid_argument);
    CHECK_THROWS_AS(nm_curve(cavity(3), DeltaRule::fixed(10), {0, 1}, opt), std::invalid_argument);
  }
  SUBCASE("failures propagate") {
    opt.horizon = 1;
    CHECK_THROWS_AS(nm_curve(cavity(3), DeltaRule::fixed(10), {1, 2}, opt), HorizonError);
  }
}

TEST_CASE("axes") {
  const auto lin = Axis::linear("omega", 0, 1, 5);
  CHECK(lin.values == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  const auto lg = Axis::log("omega", 0.01, 100, 5);
  CHECK(lg.values.front() == 0.01);
  CHECK(lg.values[2] == doctest::Approx(1));
  CHECK(lg.values.back() == 100);
  CHECK_THROWS_AS(Axis::log("omega", 0, 1, 3), std::invalid_argument);
  CHECK(parse_quantity("qfi") == Quantity::qfi);
  CHECK_THROWS_AS(parse_quantity("entropy"), std::invalid_argument);
}

TEST_CASE("run_sweep") {
  SweepSpec spec;
  spec.params = cavity(3);
  spec.drive = {10, 0};
  spec.quantity = Quantity::non_markovianity;
  spec.nm.horizon = 1000;
  spec.axes = {Axis{"omega", {0.05, 1, 2, 5}}, Axis{"delta", {1, 10}}};

  SUBCASE("1-point sweep equals the direct call") {
    SweepSpec one = spec;
    one.axes = {Axis{"omega", {2}}};
    const auto t = run_sweep(one);
    REQUIRE(t.rows.size() == 1);
    const auto direct = non_markovianity(cavity(3), ModulationDrive<double>{10, 2}, spec.nm);
    CHECK(t.rows[0].values[0] == direct.value);
    CHECK(t.value_names[0] == "N");
  }
  SUBCASE("grid order and determinism") {
    const auto a = run_sweep(spec);
    spec.threads = 1;
    const auto b = run_sweep(spec);
    REQUIRE(a.rows.size() == 8);
    CHECK(a.rows[1].point == std::vector<double>{0.05, 10});
    CHECK(a.rows[2].point == std::vector<double>{1, 1});
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].index == i);
      CHECK(a.rows[i].point == b.rows[i].point);
      for (std::size_t j = 0; j < a.rows[i].values.size(); ++j)
        CHECK(same_bits(a.rows[i].values[j], b.rows[i].values[j]));
    }
  }
  SUBCASE("shuffled axes give the same sorted table") {
    const auto a = run_sweep(spec);
    SweepSpec shuffled = spec;
    std::reverse(shuffled.axes[0].values.begin(), shuffled.axes[0].values.end());
    std::reverse(shuffled.axes[1].values.begin(), shuffled.axes[1].values.end());
    auto b = run_sweep(shuffled);
    auto rows = a.rows;
    auto key = [](const SweepRow& x, const SweepRow& y) { return x.point < y.point; };
    std::sort(rows.begin(), rows.end(), key);
    std::sort(b.rows.begin(), b.rows.end(), key);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].point == b.rows[i].point);
      CHECK(rows[i].values == b.rows[i].values);
    }
  }
  SUBCASE("per-row failures do not abort the sweep") {
    spec.nm.horizon = 25;
    spec.axes = {Axis{"omega", {2}}, Axis{"lambda", {0.01, 100}}};
    const auto t = run_sweep(spec);
    CHECK_FALSE(t.rows[0].error.empty());
    CHECK(std::isnan(t.rows[0].values[0]));
    CHECK(t.rows[1].error.empty());
  }
  SUBCASE("ratio axis") {
    spec.quantity = Quantity::coherence;
    spec.solver.t_max = 50;
    spec.axes = {Axis{"omega", {5}}, Axis{"delta_over_omega", {0, 2.40483}}};
    spec.params = cavity(0.01);
    const auto t = run_sweep(spec);
    CHECK(t.value_names == std::vector<std::string>{"lifetime", "final_coherence"});
    // Undriven coherence at gamma t = 50 is far below the J0-zero drive.
    CHECK(t.rows[1].values[1] > t.rows[0].values[1]);
  }
  SUBCASE("two-qubit lifetimes ordered") {
    spec.quantity = Quantity::two_qubit_resources;
    spec.solver.t_max = 200;
    spec.drive = {};
    spec.axes = {Axis{"r", {1, 0.8, 0.5}}, Axis{"lambda", {3}}};
    const auto t = run_sweep(spec);
    for (const auto& row : t.rows) {
      REQUIRE(row.error.empty());
      CHECK(row.values[2] >= row.values[1]);
      CHECK(row.values[1] >= row.values[0]);
    }
  }
  SUBCASE("gamma_t columns") {
    spec.quantity = Quantity::gamma_t;
    spec.solver.t_max = 10;
    spec.axes = {Axis{"lambda", {100}}};
    spec.drive = {};
    const auto t = run_sweep(spec);
    CHECK(t.rows[0].values[0] == doctest::Approx(1).epsilon(0.02));
  }
  SUBCASE("invalid specs") {
    spec.axes.clear();
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec.axes = {Axis{"kappa", {1}}};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec.axes = {Axis{"r", {1.5}}};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  }
}
