#include <cmath>
#include <random>

#include "doctest.h"
#include "modeshift/analysis/analysis.hpp"
#include "modeshift/error.hpp"
#include "modeshift/plant/plant.hpp"
#include "modeshift/synth/cascade.hpp"
#include "modeshift/synth/synth.hpp"

using namespace modeshift;
using namespace modeshift::synth;
using tf::cplx;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

SynthParams with_kappa(const std::string& name) { return apply_mode_point(SynthParams{}, preset(name)); }

// lim_{s->0} s*K(s) from the coefficients, K having a simple origin pole.
double residue_at_origin(const tf::RationalTF& K) {
  REQUIRE(K.den().origin_multiplicity() == 1);
  return K.num().coeff(0) / K.den().strip_origin().coeff(0);
}

SynthParams random_params(std::mt19937& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SynthParams p;
  p.line.R = 1e-3 + 0.2 * u(g);
  p.line.L = 0.5e-3 + 2e-3 * u(g);
  p.alpha_v = 5.0 + 20.0 * u(g);
  p.beta_v = p.alpha_v * (0.5 + 3.0 * u(g));
  p.alpha_theta = 200.0 + 600.0 * u(g);
  p.beta_theta = p.alpha_theta * (0.005 + 0.03 * u(g));
  return p;
}

}  // namespace

TEST_CASE("presets") {
  CHECK(preset("GFM") == ModePoint{2.0, 0.02});
  CHECK(preset("GFL") == ModePoint{0.0, 0.0});
  CHECK(preset("STATCOM") == ModePoint{0.0, 0.02});
  CHECK(preset("ESS") == ModePoint{2.0, 0.0});
  CHECK(preset("VSI") == ModePoint{10.0, 0.5});
  CHECK_THROWS_AS(preset("droop"), Error);
}

TEST_CASE("apply_mode_point sets betas from kappa") {
  const auto p = apply_mode_point(SynthParams{}, {1.5, 0.04});
  CHECK(p.beta_v == doctest::Approx(1.5 * p.alpha_v));
  CHECK(p.beta_theta == doctest::Approx(0.04 * p.alpha_theta));
  CHECK(p.kappa().kv == doctest::Approx(1.5));
  CHECK(p.kappa().ktheta == doctest::Approx(0.04));
  CHECK_THROWS_AS(apply_mode_point(SynthParams{}, {-1.0, 0.0}), Error);
}

TEST_CASE("diagonal shaper decouples the line") {
  const plant::LineParams line;
  const double wm = 2 * M_PI * 1000.0, Z = line.Z();
  const auto GM = make_KL(line, wm, Shaper::Diagonal) * plant::line_tf(line);
  for (double w : {0.0, 3.0, 377.0, 2000.0, 1e5}) {
    const cplx ref = (wm / Z) / cplx(wm, w);
    const auto m = GM.at(w);
    CHECK(rel_err(m(0, 0), ref) < 1e-9);
    CHECK(rel_err(m(1, 1), ref) < 1e-9);
    CHECK(std::abs(m(0, 1)) < 1e-9 * std::abs(ref));
    CHECK(std::abs(m(1, 0)) < 1e-9 * std::abs(ref));
  }
  const auto K0 = make_KL(line, wm, Shaper::Diagonal).at(0.0);
  const double c = std::cos(line.phi_z()), s = std::sin(line.phi_z());
  CHECK(std::abs(K0(0, 0) - c) < 1e-12);
  CHECK(std::abs(K0(0, 1) + s) < 1e-12);
  CHECK(std::abs(K0(1, 0) - s) < 1e-12);
  CHECK(std::abs(K0(1, 1) - c) < 1e-12);
}

TEST_CASE("triangular shaper yields a lower-triangular modified plant") {
  const plant::LineParams line{0.1, 1e-3, 2 * M_PI * 60.0};
  const double wm = 2 * M_PI * 1000.0, Z = line.Z(), phi = line.phi_z();
  const auto GM = make_KL(line, wm, Shaper::Triangular) * plant::line_tf(line);
  for (double w : {0.0, 10.0, 500.0}) {
    const cplx g = (wm / Z) / cplx(wm, w);
    const auto m = GM.at(w);
    CHECK(rel_err(m(0, 0), g) < 1e-9);
    CHECK(std::abs(m(0, 1)) < 1e-9 * std::abs(g));
    CHECK(rel_err(m(1, 0), g * std::cos(phi)) < 1e-9);
    CHECK(rel_err(m(1, 1), g * std::sin(phi)) < 1e-9);
  }
}

TEST_CASE("PR compensator") {
  const double w0 = 2 * M_PI * 60.0, dw = 2 * M_PI * 0.5;
  const auto unity = make_PR(0.0, dw, w0);
  CHECK(std::abs(unity.at(123.0) - cplx(1.0)) < 1e-15);
  for (double k : {1.0, 5.0, 20.0}) {
    CHECK(std::abs(make_PR(k, dw, w0, 1).at(w0)) == doctest::Approx(1.0 + k).epsilon(1e-9));
    CHECK(std::abs(make_PR(k, dw, w0, 2).at(2 * w0)) == doctest::Approx(1.0 + k).epsilon(1e-9));
    CHECK(std::abs(make_PR(k, dw, w0, 1).at(0.0)) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(make_PR(-1.0, dw, w0), Error);
  CHECK_THROWS_AS(make_PR(1.0, dw, w0, 0), Error);
}

TEST_CASE("structural integrator counts per preset") {
  CHECK(make_controllers(with_kappa("GFM")).structural_integrators == IntegratorCounts{0, 1});
  CHECK(make_controllers(with_kappa("GFL")).structural_integrators == IntegratorCounts{1, 2});
  CHECK(make_controllers(with_kappa("STATCOM")).structural_integrators == IntegratorCounts{1, 1});
  CHECK(make_controllers(with_kappa("ESS")).structural_integrators == IntegratorCounts{0, 2});
  CHECK(make_controllers(with_kappa("VSI")).structural_integrators == IntegratorCounts{0, 1});
}

TEST_CASE("d-axis dc droop equals Z + alpha_v/beta_v") {
  std::mt19937 g(21);
  for (int k = 0; k < 100; ++k) {
    const SynthParams p = random_params(g);
    const auto cs = make_controllers(p);
    const double Z = p.line.Z();
    const double droop = Z + cs.Kd.at(0.0).real();
    CHECK(droop == doctest::Approx(Z + p.alpha_v / p.beta_v).epsilon(1e-9));
    CHECK(std::abs(cs.Kd.at(0.0).imag()) < 1e-12 * droop);
  }
}

TEST_CASE("q-axis dc droop equals alpha_theta/beta_theta") {
  std::mt19937 g(22);
  for (int k = 0; k < 100; ++k) {
    const SynthParams p = random_params(g);
    const auto cs = make_controllers(p);
    CHECK(residue_at_origin(cs.K2q) == doctest::Approx(p.alpha_theta / p.beta_theta).epsilon(1e-9));
    CHECK(std::abs(cs.K1q.at(0.0)) < 1e-9);  // K1q contributes nothing at dc
  }
}

TEST_CASE("d-axis droop grows without bound as kappa_v shrinks") {
  double prev = 0.0;
  for (double kv : {4.0, 2.0, 1.0, 0.5, 0.1, 0.01, 1e-4}) {
    const auto cs = make_controllers(apply_mode_point(SynthParams{}, {kv, 0.02}));
    const double droop = cs.params.line.Z() + cs.Kd.at(0.0).real();
    CHECK(droop > prev);
    prev = droop;
  }
  CHECK(prev > 1e4);
}

TEST_CASE("synchronization structure holds for every kappa_theta") {
  for (double kt : {0.0, 1e-4, 0.02, 0.5}) {
    const auto cs = make_controllers(apply_mode_point(SynthParams{}, {2.0, kt}));
    const auto sc = analysis::sync_check(cs);
    CHECK(sc.ok);
    CHECK(sc.ratio_origin_zeros >= 2);
    CHECK(sc.k2q_origin_poles == (kt > 0.0 ? 1 : 2));
    CHECK(tf::count_origin_roots(cs.Kd.den()) == 0);
  }
}

TEST_CASE("cascade split reproduces the outer controllers") {
  const plant::InverterParams inv;
  std::mt19937 g(31);
  std::uniform_real_distribution<double> lw(-1.0, 4.5);
  for (const char* m : {"GFM", "GFL", "STATCOM", "ESS", "VSI"}) {
    const auto cs = make_controllers(with_kappa(m));
    const auto r = split_cascade(cs, inv);
    CHECK(r.Kinv_d.relative_degree() == 2);
    CHECK(r.Kinv_q.relative_degree() == 2);
    for (int i = 0; i < 20; ++i) {
      const double w = std::pow(10.0, lw(g));
      CHECK(rel_err(r.Kc_d.at(w) * r.Kinv_d.at(w), cs.Kd.at(w)) < 1e-8);
      CHECK(rel_err(r.Kc_q.at(w) * r.Kinv_q.at(w), cs.K1q.at(w)) < 1e-8);
    }
  }
}

TEST_CASE("inner bandwidth equals pole sum minus zero sum") {
  SynthParams p;
  p.wd = 2 * M_PI * 300.0;
  p.alpha_v = 10.0;
  const auto r = split_cascade(make_controllers(p), plant::InverterParams{});
  CHECK(r.wc_d == doctest::Approx(5644.9).epsilon(1e-4));
  CHECK(r.wc_d == doctest::Approx(3 * p.wd - p.alpha_v).epsilon(1e-12));
  CHECK(r.wc_q == doctest::Approx(p.w2 + 2 * p.wq).epsilon(1e-12));
}

TEST_CASE("voltage compensator rejects a low relative degree") {
  CHECK_THROWS_AS(voltage_compensator(tf::Polynomial{1.0, 1.0}, tf::Polynomial{1.0, 1.0}, 1e-5, nullptr), Error);
}

TEST_CASE("inertia design places the theta bandwidth") {
  for (double fJ : {5.0, 20.0}) {
    SynthParams p;
    if (fJ > 10.0) p.w2 = 2 * M_PI * 40.0;
    p = design_for_inertia(p, 2 * M_PI * fJ);
    const auto cs = make_controllers(p);
    const auto G = modified_plant(p, p.line)(1, 1);
    const double bw = minus3db_bandwidth(theta_tf(G, cs.K1q, cs.K2q), 1e-2, 1e5);
    CHECK(bw == doctest::Approx(2 * M_PI * fJ).epsilon(0.2));
  }
}

TEST_CASE("separation warnings do not block synthesis") {
  SynthParams p;
  p.w1 = p.w2 * 2.0;  // breaks w1 < w2
  CHECK_FALSE(p.check().empty());
  CHECK_NOTHROW(make_controllers(p));
  p.a_d = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}
