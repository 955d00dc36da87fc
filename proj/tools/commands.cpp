#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "modeshift/error.hpp"
#include "modeshift/io/csv.hpp"
#include "modeshift/io/manifest.hpp"
#include "modeshift/io/report.hpp"
#include "modeshift/io/scenario_io.hpp"
#include "modeshift/sim/metrics.hpp"
#include "modeshift/sim/simulator.hpp"

namespace modeshift::cli {

namespace {

int code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NumericalDivergence: return kDivergence;
    case ErrorCode::SingularMatrix:
    case ErrorCode::EvaluationAtPole:
    case ErrorCode::SplitNotApplicable:
    case ErrorCode::NonGfmDesign: return kAnalysisFailure;
    default: return kValidation;
  }
}

// Runs fn and maps library errors to exit codes.
template <class F>
int guarded(std::ostream& err, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

const sim::InverterConfig& pick(const sim::Scenario& sc, const std::string& id) {
  if (id.empty()) return sc.inverters.front();
  const int i = sc.inverter_index(id);
  if (i < 0) throw Error(ErrorCode::Validation, "no inverter '" + id + "'");
  return sc.inverters[static_cast<size_t>(i)];
}

// Writes to `path`, or to out when empty.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Validation, path + ": cannot write");
  write(f);
}

std::filesystem::path default_out_dir(const std::string& name) {
  const char* env = std::getenv("MODESHIFT_OUT_DIR");
  return std::filesystem::path(env && *env ? env : "out") / name;
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const sim::Scenario sc = io::load_scenario(a.file);
    std::vector<io::DesignAnalysis> res;
    for (const auto& inv : sc.inverters) res.push_back(io::analyze_inverter(inv));
    emit(a.out, out, [&](std::ostream& o) { o << io::analysis_json(sc, res); });
    const bool pass = std::all_of(res.begin(), res.end(), [](const auto& r) { return r.pass; });
    if (!pass) err << "stability verdict failed\n";
    return pass ? kOk : kAnalysisFailure;
  });
}

int cmd_bode(const BodeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::Loop loop = io::loop_from(a.loop);
    if (!(a.w_min > 0.0 && a.w_max > a.w_min && a.per_decade > 0))
      throw Error(ErrorCode::Validation, "frequency grid needs 0 < wmin < wmax and points > 0");
    const sim::Scenario sc = io::load_scenario(a.file);
    const auto t = io::bode(pick(sc, a.inverter), loop, tf::log_grid(a.w_min, a.w_max, a.per_decade));
    emit(a.out, out, [&](std::ostream& o) { io::write_csv(o, t); });
    return kOk;
  });
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const sim::Scenario sc = io::load_scenario(a.file);
    const std::filesystem::path dir = a.out.empty() ? default_out_dir(sc.name) : std::filesystem::path(a.out);
    const std::string started = io::utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const sim::SimResult r = sim::Simulator(sc).run_partial();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const io::RunManifest m = io::write_run(dir, sc, r, wall, started);
    out << "scenario " << sc.name << " (" << m.scenario_hash << "): " << (r.completed ? "completed" : "DIVERGED")
        << " in " << wall << " s, " << r.t.size() << " samples -> " << dir.string() << "\n";
    if (!r.completed) {
      err << "error [NumericalDivergence]: " << r.failure << "\n";
      return kDivergence;
    }
    return kOk;
  });
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (a.values.empty()) throw Error(ErrorCode::Validation, "sweep needs at least one value");
    const sim::Scenario base = io::load_scenario(a.file);
    std::vector<sim::Scenario> runs;
    for (double v : a.values) runs.push_back(io::with_param(base, a.param, v));
    const std::string id = pick(base, a.inverter).id;

    io::CsvTable t;
    std::vector<double> pass, pm_d, pm_q, gm_d, gm_q, gc_d, gc_q, bw;
    for (const auto& sc : runs) {
      bool ok = true;
      for (const auto& inv : sc.inverters) ok = io::analyze_inverter(inv).pass && ok;
      const auto r = io::analyze_inverter(pick(sc, id));
      pass.push_back(ok ? 1.0 : 0.0);
      pm_d.push_back(r.stability.margins_d.phase_margin_deg);
      pm_q.push_back(r.stability.margins_q.phase_margin_deg);
      gm_d.push_back(r.stability.margins_d.gain_margin_db);
      gm_q.push_back(r.stability.margins_q.gain_margin_db);
      gc_d.push_back(r.stability.margins_d.gain_crossover);
      gc_q.push_back(r.stability.margins_q.gain_crossover);
      bw.push_back(r.mode.theta_bandwidth);
    }
    t.add("value", "1", a.values);
    t.add("analysis_pass", "1", pass);
    t.add("pm_d", "deg", pm_d);
    t.add("pm_q", "deg", pm_q);
    t.add("gm_d", "dB", gm_d);
    t.add("gm_q", "dB", gm_q);
    t.add("crossover_d", "rad/s", gc_d);
    t.add("crossover_q", "rad/s", gc_q);
    t.add("theta_bandwidth", "rad/s", bw);

    bool diverged = false;
    if (a.simulate) {
      const auto results = sim::run_many(runs, a.threads);
      std::vector<double> done, settle, over, fin;
      for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const auto& sc = runs[i];
        done.push_back(r.completed ? 1.0 : 0.0);
        diverged = diverged || !r.completed;
        const double step = a.t0 >= 0.0 ? a.t0 : (sc.events.empty() ? 0.0 : sc.events.front().t);
        const std::vector<double>* x = nullptr;
        if (r.completed) {
          const auto& bus_names = sim::BusTrace::signal_names();
          x = std::find(bus_names.begin(), bus_names.end(), a.signal) != bus_names.end()
                  ? r.bus.signal(a.signal)
                  : r.inverter(id).signal(a.signal);
          if (!x) throw Error(ErrorCode::Validation, "unknown signal '" + a.signal + "'");
        }
        if (x && step > r.t.front() && step < r.t.back()) {
          const auto m = sim::step_metrics(r.t, *x, step, 0.02);
          settle.push_back(m.settling);
          over.push_back(100.0 * m.overshoot);
          fin.push_back(m.final);
        } else {
          settle.push_back(std::nan(""));
          over.push_back(std::nan(""));
          fin.push_back(x ? x->back() : std::nan(""));
        }
      }
      t.add("completed", "1", done);
      t.add("settling", "s", settle);
      t.add("overshoot", "%", over);
      t.add("final", io::signal_unit(a.signal), fin);
    }
    emit(a.out, out, [&](std::ostream& o) { io::write_csv(o, t); });
    if (diverged) return kDivergence;
    return std::all_of(pass.begin(), pass.end(), [](double p) { return p > 0.5; }) ? kOk : kAnalysisFailure;
  });
}

int cmd_modes(const ModesArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const sim::Scenario sc = a.file.empty() ? sim::default_scenario() : io::load_scenario(a.file);
    if (a.inverter.empty()) {
      for (const auto& inv : sc.inverters) out << io::modes_text(inv) << "\n";
    } else {
      out << io::modes_text(pick(sc, a.inverter));
    }
    return kOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mode-continuum inverter control toolkit"};
  app.set_version_flag("--version", io::toolkit_version());
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Stability and mode report (JSON)");
  c_an->add_option("file", an.file, "Scenario or design file")->required();
  c_an->add_option("-o,--out", an.out, "Write the report here instead of stdout");

  BodeArgs bo;
  auto* c_bo = app.add_subcommand("bode", "Frequency response CSV");
  c_bo->add_option("file", bo.file, "Scenario or design file")->required();
  c_bo->add_option("--loop", bo.loop, "d, q, Ttheta, Tv, eps or sigma")->required();
  c_bo->add_option("--inverter", bo.inverter, "Inverter id (default: first)");
  c_bo->add_option("--wmin", bo.w_min, "Lowest frequency, rad/s");
  c_bo->add_option("--wmax", bo.w_max, "Highest frequency, rad/s");
  c_bo->add_option("--points", bo.per_decade, "Points per decade");
  c_bo->add_option("-o,--out", bo.out, "Output CSV (default: stdout)");

  SimulateArgs si;
  auto* c_si = app.add_subcommand("simulate", "Time-domain run: CSV traces and a manifest");
  c_si->add_option("file", si.file, "Scenario file")->required();
  c_si->add_option("-o,--out", si.out, "Output directory (default: $MODESHIFT_OUT_DIR/<name> or out/<name>)");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "One run per parameter value, aggregated CSV");
  c_sw->add_option("file", sw.file, "Template scenario")->required();
  c_sw->add_option("--param", sw.param, "Dotted path, e.g. inverters.inv1.line.L")->required();
  c_sw->add_option("--values", sw.values, "Values (comma separated)")->required()->delimiter(',');
  c_sw->add_option("--inverter", sw.inverter, "Inverter for the metrics (default: first)");
  c_sw->add_option("--signal", sw.signal, "Step-response signal");
  c_sw->add_option("--t0", sw.t0, "Step time (default: first event)");
  c_sw->add_flag("!--no-sim", sw.simulate, "Analysis only");
  c_sw->add_option("--threads", sw.threads, "Worker threads (0: hardware)");
  c_sw->add_option("-o,--out", sw.out, "Output CSV (default: stdout)");

  ModesArgs mo;
  auto* c_mo = app.add_subcommand("modes", "Mode table and the design's place on the continuum");
  c_mo->add_option("file", mo.file, "Scenario or design file (default: built-in design)");
  c_mo->add_option("--inverter", mo.inverter, "Inverter id (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  if (c_an->parsed()) return cmd_analyze(an, out, err);
  if (c_bo->parsed()) return cmd_bode(bo, out, err);
  if (c_si->parsed()) return cmd_simulate(si, out, err);
  if (c_sw->parsed()) return cmd_sweep(sw, out, err);
  return cmd_modes(mo, out, err);
}

}  // namespace modeshift::cli
