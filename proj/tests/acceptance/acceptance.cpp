// Acceptance criteria AC1..AC10. Prints one PASS/FAIL line per criterion
// and exits nonzero when any fails. Pass criterion names (e.g. AC4) as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modeshift/analysis/analysis.hpp"
#include "modeshift/io/report.hpp"
#include "modeshift/io/scenario_io.hpp"
#include "modeshift/sim/metrics.hpp"
#include "modeshift/sim/ramp_study.hpp"
#include "modeshift/sim/simulator.hpp"
#include "modeshift/sim/spectral.hpp"

#ifndef MODESHIFT_SCENARIO_DIR
#define MODESHIFT_SCENARIO_DIR "scenarios"
#endif

using namespace modeshift;
using sim::Scenario;
using sim::SimResult;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario load(const std::string& name) {
  return io::load_scenario(std::filesystem::path(MODESHIFT_SCENARIO_DIR) / (name + ".toml"));
}

Scenario with_mode(Scenario sc, synth::ModePoint k) {
  for (auto& inv : sc.inverters) inv.kappa0 = k;
  return sc;
}

double max_current(const SimResult& r) {
  double m = 0.0;
  for (const auto& tr : r.inverters)
    for (size_t k = 0; k < tr.ig_d.size(); ++k) m = std::max(m, std::hypot(tr.ig_d[k], tr.ig_q[k]));
  return m;
}

const double kW0 = 2.0 * M_PI * 60.0;

// ---------------------------------------------------------------------------

Verdict ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto grid = tf::log_grid(1.0, 1e4, 50);
  double worst = 0.0, worst_st = 0.0;
  int designs = 0, draws = 0;
  while (designs < 50 && draws < 500) {
    ++draws;
    synth::SynthParams p;
    plant::LineParams line;
    line.L = 0.2e-3 * std::pow(25.0, U(rng));
    line.R = 1e-3 + 0.3 * U(rng);
    p.line = line;
    p.a_d = 0.5 + 0.5 * U(rng);
    p.a_q = 0.15 + 0.35 * U(rng);
    p.shaper = U(rng) < 0.5 ? synth::Shaper::Diagonal : synth::Shaper::Triangular;
    // Actual line off the design line so Gamma differs from I.
    plant::LineParams actual = line;
    actual.L *= 0.5 + U(rng);
    p = synth::apply_mode_point(p, {4.0 * U(rng), 0.04 * U(rng)});
    const analysis::Design d{synth::make_controllers(p), actual};
    const auto [Ld, Lq] = analysis::open_loops(d);
    if (!analysis::closed_loop_stable(Ld, 1e-6) || !analysis::closed_loop_stable(Lq, 1e-6)) continue;
    const auto fr = analysis::factorize(d.cs.KL, d.cs.K_tilde(), plant::line_tf(actual), grid);
    worst = std::max(worst, fr.max_residual);
    worst_st = std::max(worst_st, fr.max_st_residual);
    ++designs;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {designs == 50 && worst < 1e-8 && worst_st < 1e-10 && secs < 10.0,
          fmt("%d designs, max|S - Gamma Xc S~| = %.2e (< 1e-8), max|S + T - I| = %.2e (< 1e-10), %.2f s (< 10 s)",
              designs, worst, worst_st, secs)};
}

Verdict ac2() {
  double e_det = 0.0, e_k = 0.0;
  const plant::LineParams line;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double p1 = -0.7 + 1.4 * i / 9.0, p2 = -0.7 + 1.4 * j / 9.0;
      const auto r = analysis::shaper_conditioning(p1, p2, line);
      e_det = std::max(e_det, std::abs(r.det_Xc_inf_formula - r.det_Xc_inf_numeric) /
                                  std::max(1.0, std::abs(r.det_Xc_inf_formula)));
      e_k = std::max(e_k, std::abs(r.kappa_formula - r.kappa_numeric) / std::max(1.0, r.kappa_formula));
    }
  return {e_det < 1e-6 && e_k < 1e-6,
          fmt("10x10 sweep: det(Xc) error %.2e, condition number error %.2e (< 1e-6)", e_det, e_k)};
}

Verdict ac3() {
  const Scenario sc = load("grid_step");
  const auto a = io::analyze_inverter(sc.inverters[0]);
  const auto& md = a.stability.margins_d;
  const auto& mq = a.stability.margins_q;
  const bool pm = std::abs(md.phase_margin_deg - 60.0) <= 5.0 && std::abs(mq.phase_margin_deg - 60.0) <= 5.0;
  const bool gm = md.gain_margin_db >= 17.0 && mq.gain_margin_db >= 17.0;

  std::vector<Scenario> runs;
  for (double L : {0.2e-3, 1e-3, 5e-3})
    for (const char* mode : {"GFM", "GFL"}) {
      Scenario s = with_mode(load("grid_step"), synth::preset(mode));
      s.solver.duration = 2.0;
      s.inverters[0].line.L = L;  // design line stays at 1 mH
      runs.push_back(s);
    }
  const auto res = sim::run_many(runs);
  bool bounded = true;
  double peak = 0.0;
  for (const auto& r : res) {
    bounded = bounded && r.completed && max_current(r) < 20.0 * runs[0].inverters[0].inv.rating;
    if (r.completed) peak = std::max(peak, max_current(r));
  }
  return {pm && gm && bounded,
          fmt("PM d/q = %.1f/%.1f deg (60 +- 5) %s; GM d/q = %.1f/%.1f dB (>= 17) %s; L in {0.2,1,5} mH "
              "GFM+GFL 2 s runs %s (peak |ig| %.1f A)",
              md.phase_margin_deg, mq.phase_margin_deg, pm ? "ok" : "FAIL", md.gain_margin_db, mq.gain_margin_db,
              gm ? "ok" : "FAIL", bounded ? "bounded" : "UNBOUNDED", peak)};
}

Verdict ac4() {
  const char* modes[] = {"GFL", "GFM", "STATCOM", "ESS"};
  std::vector<Scenario> runs;
  for (const char* m : modes) {
    Scenario s = with_mode(load("grid_step"), synth::preset(m));
    s.solver.duration = 6.0;
    runs.push_back(s);
  }
  const auto res = sim::run_many(runs);
  bool ok = true;
  std::ostringstream det;
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& inv = runs[i].inverters[0];
    const double small = 0.005 * inv.inv.rating;
    if (!res[i].completed) {
      ok = false;
      det << modes[i] << " diverged; ";
      continue;
    }
    const auto& tr = res[i].inverters[0];
    const double ed = sim::window_mean(res[i].t, tr.ep_d, 6.0, 0.5), eq = sim::window_mean(res[i].t, tr.ep_q, 6.0, 0.5);
    const auto m = analysis::classify_mode(io::design_of(inv).cs);
    const auto pred = analysis::steady_state_error(m, 0.1 * inv.inv.v0, 2.0 * M_PI * 0.1, inv.inv.v0);
    auto check = [&](double meas, double p) {
      if (p == 0.0) return std::abs(meas) < small;
      return std::abs(meas - p) <= 0.02 * std::abs(p);
    };
    const bool good = check(ed, pred.e_d) && check(eq, pred.e_q);
    ok = ok && good;
    det << modes[i] << " e'=(" << fmt("%.3f, %.3f", ed, eq) << ") pred (" << fmt("%.3f, %.3f", pred.e_d, pred.e_q)
        << ")" << (good ? "" : " FAIL") << "; ";
  }
  return {ok, det.str() + "tolerance 2% or 0.5% pu"};
}

Verdict ac5() {
  const Scenario sc = load("sharing");
  const SimResult r = sim::run(sc);
  const double gamma[] = {0.22, 0.33, 0.45};
  double worst = 0.0;
  std::ostringstream det;
  for (double t : {1.45, 2.95}) {
    double tot = 0.0;
    std::vector<double> i_k;
    for (const auto& tr : r.inverters) {
      i_k.push_back(sim::window_mean(r.t, tr.ig_d, t, 0.25));
      tot += i_k.back();
    }
    det << "t=" << t << " shares";
    for (size_t k = 0; k < i_k.size(); ++k) {
      const double share = i_k[k] / tot;
      worst = std::max(worst, std::abs(share - gamma[k]) / gamma[k]);
      det << fmt(" %.4f", share);
    }
    det << fmt(" (load %.1f A); ", tot);
  }
  return {worst <= 0.05, det.str() + fmt("worst relative error %.2f%% (<= 5%%)", 100.0 * worst)};
}

Verdict ac6() {
  std::ostringstream det;
  bool ok = true;
  // Frequency-domain: bandwidth and peak.
  for (double fJ : {5.0, 20.0}) {
    const double wJ = 2.0 * M_PI * fJ;
    for (const char* mode : {"GFM", "GFL"}) {
      synth::SynthParams p;
      if (fJ > 10.0) p.w2 = 2.0 * M_PI * 40.0;
      p.w1 = wJ / 3.0;
      p.omega_J = wJ;
      p.wf = 5.0 * wJ;
      p = synth::apply_mode_point(p, synth::preset(mode));
      const auto cs = synth::make_controllers(p);
      const auto fs = analysis::freq_shape(cs, synth::modified_plant(cs.params, cs.params.line)(1, 1));
      const double err = std::abs(fs.bandwidth - wJ) / wJ;
      ok = ok && err <= 0.2;
      det << fmt("%s wJ=2pi%g bw err %.1f%%; ", mode, fJ, 100.0 * err);
    }
  }
  {
    synth::SynthParams p;
    p.w1 = p.omega_J / 10.0;
    for (const char* mode : {"GFM", "GFL"}) {
      const auto cs = synth::make_controllers(synth::apply_mode_point(p, synth::preset(mode)));
      const auto fs = analysis::freq_shape(cs, synth::modified_plant(cs.params, cs.params.line)(1, 1));
      ok = ok && fs.M_T_db < 3.0;
      det << fmt("%s M_T(ratio 10) %.2f dB; ", mode, fs.M_T_db);
    }
  }
  // Time-domain overshoot of theta_dot after the grid frequency step.
  std::vector<Scenario> runs;
  const char* modes[] = {"GFM", "GFL"};
  const double ratios[] = {2.0, 10.0};
  for (const char* m : modes)
    for (double ratio : ratios) {
      Scenario s = with_mode(load("freq_step"), synth::preset(m));
      s.inverters[0].synth.w1 = s.inverters[0].synth.omega_J / ratio;
      runs.push_back(s);
    }
  const auto res = sim::run_many(runs);
  double os[2][2];
  for (size_t i = 0; i < res.size(); ++i) {
    if (!res[i].completed) return {false, "frequency step run diverged: " + res[i].failure};
    os[i / 2][i % 2] = sim::step_metrics(res[i].t, res[i].inverters[0].theta_dot, 0.5, 0.02).overshoot;
  }
  const bool damp = os[0][0] > os[0][1] && os[1][0] > os[1][1];
  const bool gfm_lower = os[0][0] < os[1][0] && os[0][1] < os[1][1];
  ok = ok && damp && gfm_lower;
  det << fmt("overshoot GFM %.1f%%/%.1f%%, GFL %.1f%%/%.1f%% (ratio 2/10)", 100 * os[0][0], 100 * os[0][1],
             100 * os[1][0], 100 * os[1][1]);
  return {ok, det.str()};
}

Verdict ac7() {
  const Scenario pr = load("fault");
  const Scenario base = io::with_param(pr, "inverters.inv1.control.k_h2", 0.0);
  const auto res = sim::run_many({pr, base});
  if (!res[0].completed || !res[1].completed) return {false, "fault run diverged"};
  auto ripple = [&](const SimResult& r) {
    const auto e = sim::spectral_extract(r.inverters[0].ig_d, r.sample_period, 120.0, 0.05);
    return sim::mean_magnitude(e, r.sample_period, 0.6, 1.0);
  };
  const double a = ripple(res[0]), b = ripple(res[1]);
  const double db = 20.0 * std::log10(b / a);
  return {db >= 20.0, fmt("120 Hz ig_d: %.3f A with PR, %.3f A without, suppression %.1f dB (>= 20 dB)", a, b, db)};
}

Verdict ac8() {
  const char* modes[] = {"GFM", "GFL", "STATCOM", "ESS"};
  std::vector<Scenario> runs;
  for (const char* m : modes) runs.push_back(with_mode(load("freq_step"), synth::preset(m)));
  const auto res = sim::run_many(runs);
  bool ok = true;
  std::ostringstream det;
  const double bound = 10.0 / runs[0].inverters[0].synth.omega_J;
  for (size_t i = 0; i < res.size(); ++i) {
    if (!res[i].completed) {
      ok = false;
      det << modes[i] << " diverged; ";
      continue;
    }
    const auto& tr = res[i].inverters[0];
    const double v0 = runs[i].inverters[0].inv.v0, wg = kW0 + 2.0 * M_PI * 0.1, t_step = 0.5;
    double last = t_step;
    for (size_t k = 0; k < res[i].t.size(); ++k)
      if (res[i].t[k] >= t_step &&
          (std::abs(tr.vc_q[k]) >= 0.01 * v0 || std::abs(tr.theta_dot[k] - wg) >= 2.0 * M_PI * 0.005))
        last = res[i].t[k];
    const double settle = last - t_step;
    ok = ok && settle <= bound && last < res[i].t.back() - 0.1;
    det << fmt("%s %.3f s; ", modes[i], settle);
  }
  return {ok, det.str() + fmt("bound 10/wJ = %.3f s", bound)};
}

Verdict ac9() {
  std::ostringstream det;
  bool ok = true;
  for (const char* name : {"ongrid_transitions", "island_transitions"}) {
    const Scenario sc = load(name);
    const SimResult r = sim::Simulator(sc).run_partial();
    const double peak = r.completed ? max_current(r) : INFINITY;
    const bool b = r.completed && peak < 20.0 * sc.inverters[0].inv.rating;
    ok = ok && b;
    det << fmt("%s %s (peak |ig| %.1f A); ", name, b ? "bounded" : "UNBOUNDED", peak);
  }
  Scenario base = load("mode_ramp");
  std::erase_if(base.events, [](const sim::ScenarioEvent& e) { return e.kind == sim::EventKind::ModeRamp; });
  const std::vector<double> durations{0.01, 0.1, 1.0};
  for (int dir = 0; dir < 2; ++dir) {
    const auto from = synth::preset(dir == 0 ? "GFM" : "GFL"), to = synth::preset(dir == 0 ? "GFL" : "GFM");
    const Scenario s = with_mode(base, from);
    const auto rep = sim::mode_ramp_guard(s, "inv1", from, to, 1.0, durations, 2.0);
    bool bounded = true;
    for (const auto& c : rep.cases) bounded = bounded && c.bounded;
    ok = ok && rep.monotone && bounded;
    det << (dir == 0 ? "GFM->GFL" : "GFL->GFM") << " energy";
    for (const auto& c : rep.cases) det << fmt(" %.4g", c.energy);
    det << (rep.monotone ? " monotone; " : " NOT monotone; ");
  }
  return {ok, det.str()};
}

Verdict ac10() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const char* modes[] = {"GFM", "GFL", "STATCOM", "ESS"};
  // The bound check for each vertex design.
  std::ostringstream det;
  bool checks = true;
  for (const char* m : modes) {
    Scenario s = with_mode(load("freq_step"), synth::preset(m));
    s.inverters[0].synth.dw_max = 2.0 * M_PI * 0.5;
    const auto a = io::analyze_inverter(s.inverters[0]);
    checks = checks && a.stability.nonlinear_ok;
    det << fmt("%s bound %s; ", m, a.stability.nonlinear_ok ? "holds" : "FAILS");
  }
  if (!checks) return {false, det.str() + "precondition not met"};

  std::vector<Scenario> runs;
  for (int i = 0; i < 20; ++i) {
    Scenario s = with_mode(load("freq_step"), synth::preset(modes[i % 4]));
    s.events.clear();
    s.solver.duration = 10.0;
    s.solver.seed = static_cast<unsigned>(i);
    double f = 0.0, t = 0.5;
    const int n = 2 + static_cast<int>(U(rng) * 4.0);
    for (int k = 0; k < n && t < 9.0; ++k) {
      const double target = -0.45 + 0.9 * U(rng);  // stays inside +-0.5 Hz
      sim::ScenarioEvent e;
      e.t = t;
      if (U(rng) < 0.5) {
        e.kind = sim::EventKind::GridFreqStep;
        e.value = target - f;
      } else {
        e.kind = sim::EventKind::GridFreqRamp;
        e.duration = 0.2 + 0.8 * U(rng);
        e.value = (target - f) / e.duration;
      }
      f = target;
      s.events.push_back(e);
      if (U(rng) < 0.5) {
        sim::ScenarioEvent v;
        v.t = t;
        v.kind = sim::EventKind::GridVoltageStep;
        v.value = -0.1 + 0.2 * U(rng);
        s.events.push_back(v);
      }
      t += 0.5 + 2.0 * U(rng);
    }
    s.validate();
    runs.push_back(s);
  }
  const auto res = sim::run_many(runs);
  int bounded = 0;
  double peak = 0.0;
  for (const auto& r : res)
    if (r.completed && max_current(r) < 20.0 * runs[0].inverters[0].inv.rating) {
      ++bounded;
      peak = std::max(peak, max_current(r));
    }
  return {bounded == 20, det.str() + fmt("%d/20 randomized 10 s runs bounded (peak |ig| %.1f A)", bounded, peak)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> all{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : all) {
    if (!only.empty() && !only.count(name)) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-4s %s  %s\n", name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
