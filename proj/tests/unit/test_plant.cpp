#include <cmath>
#include <random>

#include "doctest.h"
#include "modeshift/error.hpp"
#include "modeshift/plant/plant.hpp"

using namespace modeshift;
using namespace modeshift::plant;

TEST_CASE("line transfer matrix structure") {
  const LineParams p;  // 1 mOhm, 1 mH, 60 Hz
  const auto G = line_tf(p);
  for (double w : {0.0, 10.0, 377.0, 5000.0}) {
    const auto m = G.at(w);
    CHECK(std::abs(m(0, 1) + m(1, 0)) < 1e-12 * std::abs(m(0, 1)) + 1e-15);
    CHECK(std::abs(m(0, 0) - m(1, 1)) < 1e-12 * std::abs(m(0, 0)));
  }
  // DC gain norm 1/Z.
  const auto [smax, smin] = tf::singular_values(G.at(0.0));
  const double Z = std::hypot(1e-3, 1e-3 * 2 * M_PI * 60.0);
  CHECK(smax == doctest::Approx(1.0 / Z).epsilon(1e-12));
  CHECK(smax == doctest::Approx(2.6526).epsilon(1e-4));
  CHECK(smin == doctest::Approx(smax).epsilon(1e-12));
  // Strictly proper.
  CHECK(tf::singular_values(G.at(1e9)).first < 1e-5);
}

TEST_CASE("line poles sit at -lambda") {
  std::mt19937 g(2);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int k = 0; k < 20; ++k) {
    LineParams p{u(g), u(g) * 1e-3, 2 * M_PI * 60.0};
    for (auto z : line_tf(p)(0, 0).poles()) CHECK(z.real() == doctest::Approx(-p.lambda()).epsilon(1e-9));
  }
}

TEST_CASE("line parameter validation") {
  CHECK_THROWS_AS(LineParams({-1.0, 1e-3, 377.0}).validate(), Error);
  CHECK_THROWS_AS(LineParams({1.0, 0.0, 377.0}).validate(), Error);
  CHECK_NOTHROW(LineParams({0.0, 1e-3, 377.0}).validate());
}

TEST_CASE("steady power flow oracles") {
  const LineParams inductive{0.0, 1.0, 1.0};  // Z = 1, phi = 90 deg
  auto [P, Q] = steady_power_flow(1.0, 1.0, 0.0, inductive);
  CHECK(P == doctest::Approx(0.0));
  CHECK(Q == doctest::Approx(0.0));
  std::tie(P, Q) = steady_power_flow(1.0, 1.0, 0.1, inductive);
  CHECK(P == doctest::Approx(-std::sin(0.1)).epsilon(1e-12));
  CHECK(Q == doctest::Approx(std::cos(0.1) - 1.0).epsilon(1e-12));
  const LineParams resistive{1.0, 1e-12, 1.0};  // Z = 1, phi = 0
  std::tie(P, Q) = steady_power_flow(1.0, 1.0, 0.1, resistive);
  CHECK(P == doctest::Approx(std::cos(0.1) - 1.0).epsilon(1e-9));
  CHECK(Q == doctest::Approx(std::sin(0.1)).epsilon(1e-9));
}

TEST_CASE("universal droop oracles") {
  auto [dv, dw] = universal_droop(5.0, 3.0, 5.0, 3.0, 1.0, 1.0, 0.3);
  CHECK(dv == doctest::Approx(0.0));
  CHECK(dw == doctest::Approx(0.0));
  // (P0 - P, Q0 - Q) = (1, 0)
  std::tie(dv, dw) = universal_droop(0.0, 0.0, 1.0, 0.0, 1.0, 1.0, M_PI / 2);
  CHECK(dv == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dw == doctest::Approx(1.0).epsilon(1e-12));
  std::tie(dv, dw) = universal_droop(0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0);
  CHECK(dv == doctest::Approx(1.0));
  CHECK(dw == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("power to current oracles") {
  const double v0 = 100.0;
  auto i = power_to_current(3000.0, 600.0, {v0, 0.0});
  CHECK(i[0] == doctest::Approx(2.0 / 3.0 * 3000.0 / v0));
  CHECK(i[1] == doctest::Approx(-2.0 / 3.0 * 600.0 / v0));
  i = power_to_current(0.0, 0.0, {v0, 0.0});
  CHECK(i[0] == 0.0);
  CHECK(i[1] == 0.0);
  i = power_to_current(3000.0, 600.0, {0.0, v0});
  CHECK(i[0] == doctest::Approx(2.0 / 3.0 * 600.0 / v0));
  CHECK_THROWS_AS(power_to_current(1.0, 1.0, {0.0, 0.0}), Error);
}

TEST_CASE("power to current then dq power reconstructs the setpoint") {
  std::mt19937 g(9);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0), v(10.0, 400.0);
  for (int k = 0; k < 100; ++k) {
    const double P0 = u(g), Q0 = u(g);
    const Vec2 vc{v(g), 0.0};
    const auto [P, Q] = dq_power(vc, power_to_current(P0, Q0, vc));
    CHECK(std::abs(P - P0) < 1e-12 * std::max(1.0, std::abs(P0)) + 1e-9);
    CHECK(std::abs(Q - Q0) < 1e-12 * std::max(1.0, std::abs(Q0)) + 1e-9);
  }
}

TEST_CASE("inverter params validation") {
  InverterParams p;
  CHECK_NOTHROW(p.validate(20e-6));
  p.omega_c = 2 * M_PI * 30000.0;  // above the 25 kHz Nyquist rate
  CHECK_THROWS_AS(p.validate(20e-6), Error);
}
