#include <cmath>
#include <random>

#include "doctest.h"
#include "modeshift/error.hpp"
#include "modeshift/sim/discrete_block.hpp"
#include "modeshift/sim/metrics.hpp"
#include "modeshift/sim/simulator.hpp"
#include "modeshift/sim/spectral.hpp"

using namespace modeshift;
using namespace modeshift::sim;
using tf::RationalTF;

namespace {

Scenario single(const std::string& mode, double duration) {
  Scenario sc = default_scenario("unit");
  sc.inverters[0] = default_inverter("inv1", synth::preset(mode));
  sc.solver.duration = duration;
  return sc;
}

ScenarioEvent setpoint_step(double t, double id) {
  ScenarioEvent e;
  e.t = t;
  e.kind = EventKind::SetpointStep;
  e.inverter = "inv1";
  e.setpoint = Setpoint{Setpoint::Kind::Current, id, 0.0};
  return e;
}

double period_mean(const SimResult& r, const std::vector<double>& x, double t1) {
  return window_mean(r.t, x, t1, 1.0 / 60.0);
}

}  // namespace

TEST_CASE("discrete low-pass step matches the continuous response") {
  const double a = 2 * M_PI * 50.0, Ts = 20e-6;
  DiscreteBlock b(RationalTF({a}, {a, 1.0}), Ts);
  double worst = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double y = b.step(1.0);
    // Trapezoidal update with the input held from k-1: compare to the
    // continuous response half a sample late at most.
    const double t = k * Ts;
    worst = std::max(worst, std::abs(y - (1.0 - std::exp(-a * t))));
  }
  CHECK(worst < a * Ts);
  CHECK(b.step(1.0) == doctest::Approx(1.0 - std::exp(-a * 2001 * Ts)).epsilon(1e-6));
}

TEST_CASE("discrete integrator slope and freeze") {
  const double Ts = 1e-3;
  DiscreteBlock b(RationalTF::integrator(), Ts);
  double y0 = b.step(1.0), y1 = b.step(1.0), y2 = b.step(1.0);
  CHECK(y2 - y1 == doctest::Approx(Ts));
  CHECK(y1 - y0 == doctest::Approx(Ts));
  b.commit_hold(1.0);
  const auto x = b.state();
  b.commit_hold(1.0);
  CHECK(b.state() == x);
}

TEST_CASE("set_steady puts a block at equilibrium") {
  const RationalTF t = RationalTF({4.0, 1.0}, {2.0, 3.0, 1.0});  // dc gain 2
  DiscreteBlock b(t, 20e-6);
  b.set_steady(3.0);
  for (int k = 0; k < 10; ++k) CHECK(b.step(3.0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("retune keeps the continuous state") {
  DiscreteBlock b(RationalTF({1.0}, {1.0, 1.0}), 1e-4);
  for (int k = 0; k < 100; ++k) b.step(1.0);
  const auto x = b.state();
  b.retune(RationalTF({1.0}, {2.0, 1.0}));
  CHECK(b.state() == x);
  CHECK_THROWS_AS(b.retune(RationalTF({1.0}, {1.0, 1.0, 1.0})), Error);
}

TEST_CASE("block chain equals the product") {
  const std::vector<RationalTF> parts{RationalTF({10.0}, {10.0, 1.0}), RationalTF({1.0, 1.0}, {5.0, 1.0})};
  BlockChain c(parts, 1e-4);
  DiscreteBlock p(parts[0] * parts[1], 1e-4);
  for (int k = 0; k < 500; ++k) {
    const double u = std::sin(0.01 * k);
    CHECK(c.step(u) == doctest::Approx(p.step(u)).epsilon(1e-9));
  }
}

TEST_CASE("spectral extract of a pure sinusoid and of dc") {
  const double dt = 1e-4, f = 120.0, A = 2.5;
  std::vector<double> sine, dc;
  for (int k = 0; k < 5000; ++k) {
    sine.push_back(A * std::sin(2 * M_PI * f * k * dt + 0.3));
    dc.push_back(7.0);
  }
  const auto s = spectral_extract(sine, dt, f, 0.05);
  for (double m : s.magnitude) CHECK(m == doctest::Approx(A).epsilon(0.01));
  for (double m : spectral_extract(dc, dt, f, 0.05).magnitude) CHECK(std::abs(m) < 1e-9);
  CHECK(mean_magnitude(s, dt, 0.1, 0.4) == doctest::Approx(A).epsilon(0.01));
  CHECK_THROWS_AS(spectral_extract(sine, dt, f, 0.01), Error);
}

TEST_CASE("step metrics on a first-order response") {
  std::vector<double> t, x;
  for (int k = 0; k <= 20000; ++k) {
    t.push_back(k * 1e-4);
    x.push_back(t.back() < 0.5 ? 1.0 : 3.0 - 2.0 * std::exp(-(t.back() - 0.5) / 0.1));
  }
  const auto m = step_metrics(t, x, 0.5, 0.02);
  CHECK(m.initial == doctest::Approx(1.0));
  CHECK(m.final == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(m.overshoot < 1e-5);
  CHECK(m.settling == doctest::Approx(0.1 * std::log(50.0)).epsilon(1e-2));
  CHECK(m.settled);
}

TEST_CASE("bus solve") {
  const Vec2 grid{100.0, 0.0};
  CHECK(bus_solve(true, grid, {}, {}, {}) == grid);
  PhysicalState s;
  s.ig = {10.0, 0.0};
  LoadConfig load;
  load.R = 10.0;
  const Vec2 v = bus_solve(false, grid, load, {s}, {});
  CHECK(v[0] == doctest::Approx(100.0));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(bus_solve(false, grid, LoadConfig{}, {s}, {}), Error);
}

TEST_CASE("nominal equilibrium holds within 0.2 s") {
  const auto r = run(single("GFM", 0.2));
  REQUIRE(r.completed);
  const auto& inv = r.inverters[0];
  const double v0 = plant::InverterParams{}.v0;
  const double i_tol = 0.01 * plant::InverterParams{}.rating;  // 1% of rated current
  CHECK(std::abs(period_mean(r, inv.vc_d, 0.2) - v0) < 1e-3 * v0);
  CHECK(std::abs(period_mean(r, inv.vc_q, 0.2)) < 1e-3 * v0);
  CHECK(std::abs(period_mean(r, inv.ig_d, 0.2)) < i_tol);
  CHECK(std::abs(period_mean(r, inv.ig_q, 0.2)) < i_tol);
}

TEST_CASE("recorded series invariants") {
  Scenario sc = single("GFM", 0.2);
  sc.events.push_back(setpoint_step(0.05, 5.0));
  const auto r = run(sc);
  for (size_t k = 1; k < r.t.size(); ++k) CHECK(r.t[k] > r.t[k - 1]);
  for (double th : r.inverters[0].theta) {
    CHECK(th >= 0.0);
    CHECK(th < 2 * M_PI);
  }
  // P from the three-phase dq power of the recorded terminal quantities.
  const auto& v = r.inverters[0];
  const size_t k = r.t.size() - 1;
  CHECK(v.P[k] == doctest::Approx(1.5 * (v.vc_d[k] * v.ig_d[k] + v.vc_q[k] * v.ig_q[k])).epsilon(1e-9));
}

TEST_CASE("GFL current step settles to the setpoint within 5/wd") {
  Scenario sc = single("GFL", 1.0);
  sc.events.push_back(setpoint_step(0.2, 5.0));
  const auto r = run(sc);
  REQUIRE(r.completed);
  const auto& ig = r.inverters[0].ig_d;
  CHECK(period_mean(r, ig, 1.0) == doctest::Approx(5.0).epsilon(0.01));
  // Period-averaged so the lightly damped 60 Hz line mode does not count.
  const double wd = synth::SynthParams{}.wd;
  const double t_check = 0.2 + 5.0 / wd + 1.0 / 60.0;
  for (double t = t_check; t < 1.0; t += 0.01) {
    INFO("t = " << t);
    CHECK(period_mean(r, ig, t) == doctest::Approx(5.0).epsilon(0.01));
  }
}

TEST_CASE("divergence is reported with time and event") {
  Scenario sc = single("GFM", 0.2);
  sc.solver.physics_dt = 4e-4;  // RK4 unstable on the LC filter resonance
  sc.solver.control_Ts = 4e-4;
  sc.solver.decimation = 1;
  try {
    (void)run(sc);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalDivergence);
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
    CHECK(std::string(e.what()).find("last event") != std::string::npos);
  }
  const auto r = Simulator(sc).run_partial();
  CHECK_FALSE(r.completed);
  CHECK_FALSE(r.failure.empty());
}

TEST_CASE("scenario validation errors") {
  auto bad = [](auto mutate) {
    Scenario sc = single("GFM", 1.0);
    mutate(sc);
    CHECK_THROWS_AS(sc.validate(), Error);
  };
  bad([](Scenario& s) { s.solver.physics_dt = 0.0; });
  bad([](Scenario& s) { s.solver.control_Ts = 3e-6; });  // not a multiple of 2 us
  bad([](Scenario& s) { s.inverters.clear(); });
  bad([](Scenario& s) { s.inverters.push_back(s.inverters[0]); });
  bad([](Scenario& s) { s.inverters[0].kappa0.kv = -1.0; });
  bad([](Scenario& s) {
    ScenarioEvent e;
    e.t = 0.5;
    e.kind = EventKind::Islanding;
    s.events.push_back(e);  // islanding without a load
  });
  bad([](Scenario& s) {
    s.events.push_back(setpoint_step(0.5, 1.0));
    s.events.push_back(setpoint_step(0.2, 1.0));
  });
  bad([](Scenario& s) {
    ScenarioEvent e = setpoint_step(0.5, 1.0);
    e.inverter = "nope";
    s.events.push_back(e);
  });
  bad([](Scenario& s) { s.outputs.push_back({"ig_d", "inv1", 120.0, 0.01}); });
  bad([](Scenario& s) { s.outputs.push_back({"nope", "inv1", 120.0, 0.05}); });
  CHECK_NOTHROW(single("GFM", 1.0).validate());
}

TEST_CASE("halving the physics step barely changes the final state") {
  Scenario a = single("GFM", 0.5);
  a.events.push_back(setpoint_step(0.1, 5.0));
  Scenario b = a;
  b.solver.physics_dt = 1e-6;
  const auto ra = run(a), rb = run(b);
  const auto &x = ra.inverters[0], &y = rb.inverters[0];
  const size_t k = ra.t.size() - 1;
  REQUIRE(rb.t.size() == ra.t.size());
  const double v0 = plant::InverterParams{}.v0;
  CHECK(std::abs(x.vc_d[k] - y.vc_d[k]) < 1e-3 * v0);
  CHECK(std::abs(x.ig_d[k] - y.ig_d[k]) < 1e-3 * 5.0);
  CHECK(std::abs(x.ig_q[k] - y.ig_q[k]) < 1e-3 * 5.0);
  CHECK(std::abs(x.theta_dot[k] - y.theta_dot[k]) < 1e-3 * 2 * M_PI * 60.0);
}

TEST_CASE("stored deviation energy decays after a disturbance") {
  Scenario sc = single("GFM", 1.5);
  sc.events.push_back(setpoint_step(0.1, 5.0));
  sc.events.push_back(setpoint_step(0.3, 0.0));
  const auto r = run(sc);
  REQUIRE(r.completed);
  const auto& v = r.inverters[0];
  const plant::InverterParams inv;
  const plant::LineParams line;
  const size_t n = r.t.size() - 1;
  auto energy = [&](size_t k) {
    auto sq = [](double a, double b) { return a * a + b * b; };
    return 0.5 * inv.Li * sq(v.iL_d[k] - v.iL_d[n], v.iL_q[k] - v.iL_q[n]) +
           0.5 * inv.Ci * sq(v.vc_d[k] - v.vc_d[n], v.vc_q[k] - v.vc_q[n]) +
           0.5 * line.L * sq(v.ig_d[k] - v.ig_d[n], v.ig_q[k] - v.ig_q[n]);
  };
  // Peak energy per 0.1 s window after the last disturbance never grows.
  double prev = INFINITY, first = 0.0;
  for (double t0 = 0.35; t0 + 0.1 <= 1.4; t0 += 0.1) {
    double peak = 0.0;
    for (size_t k = r.index_at(t0); k < r.index_at(t0 + 0.1); ++k) peak = std::max(peak, energy(k));
    if (first == 0.0) first = peak;
    CHECK(peak <= prev * 1.05);
    prev = peak;
  }
  // The line's own R/L (1 s) bounds how fast the last of it can go.
  CHECK(prev < 0.5 * first);
}

TEST_CASE("run_many keeps input order") {
  std::vector<Scenario> v;
  for (double id : {1.0, 2.0, 3.0}) {
    Scenario sc = single("GFM", 0.2);
    sc.inverters[0].setpoint = {Setpoint::Kind::Current, id, 0.0};
    v.push_back(sc);
  }
  const auto rs = run_many(v, 2);
  REQUIRE(rs.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(rs[i].completed);
  CHECK(rs[0].inverters[0].ig_d.back() < rs[1].inverters[0].ig_d.back());
  CHECK(rs[1].inverters[0].ig_d.back() < rs[2].inverters[0].ig_d.back());
}
