#include "modeshift/io/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "modeshift/error.hpp"

namespace modeshift::io {

using nlohmann::json;

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json margins_json(const tf::MarginReport& m) {
  return {{"gain_margin_db", num(m.gain_margin_db)},
          {"phase_margin_deg", num(m.phase_margin_deg)},
          {"gain_crossover_rad_s", m.gain_crossover},
          {"phase_crossover_rad_s", m.phase_crossover}};
}

// Phase in degrees, unwrapped along the grid.
std::vector<double> unwrapped_phase(const std::vector<tf::cplx>& h) {
  std::vector<double> ph;
  double prev = 0.0, offset = 0.0;
  for (size_t i = 0; i < h.size(); ++i) {
    const double a = std::arg(h[i]) * 180.0 / M_PI;
    if (i > 0) offset -= 360.0 * std::round((a + offset - prev) / 360.0);
    prev = a + offset;
    ph.push_back(prev);
  }
  return ph;
}

std::vector<double> to_hz(const std::vector<double>& w) {
  std::vector<double> hz;
  for (double x : w) hz.push_back(x / (2.0 * M_PI));
  return hz;
}

CsvTable siso_table(const tf::RationalTF& f, const std::vector<double>& grid) {
  std::vector<tf::cplx> h;
  std::vector<double> mag;
  for (double w : grid) {
    h.push_back(f.at(w));
    mag.push_back(20.0 * std::log10(std::abs(h.back())));
  }
  CsvTable t;
  t.add("omega", "rad/s", grid);
  t.add("f", "Hz", to_hz(grid));
  t.add("mag", "dB", mag);
  t.add("phase", "deg", unwrapped_phase(h));
  return t;
}

}  // namespace

analysis::Design design_of(const sim::InverterConfig& cfg) {
  return {synth::make_controllers(sim::design_params(cfg)), cfg.line};
}

DesignAnalysis analyze_inverter(const sim::InverterConfig& cfg) {
  DesignAnalysis a;
  a.id = cfg.id;
  const analysis::Design d = design_of(cfg);
  a.stability = analysis::check_stability(d, d.cs.params.dw_max);
  a.mode = analysis::classify_mode(d.cs);
  a.sync = analysis::sync_check(d.cs);
  a.warnings = d.cs.warnings;
  a.pass = a.stability.overall() && a.sync.ok;
  return a;
}

std::string analysis_json(const sim::Scenario& sc, const std::vector<DesignAnalysis>& results) {
  json inv = json::array();
  bool all = true;
  for (const auto& a : results) {
    all = all && a.pass;
    const auto& s = a.stability;
    const auto& m = a.mode;
    inv.push_back({
        {"id", a.id},
        {"pass", a.pass},
        {"stability",
         {{"siso_d", s.siso_ok_d},
          {"siso_q", s.siso_ok_q},
          {"max_pole_re_d", s.max_pole_re_d},
          {"max_pole_re_q", s.max_pole_re_q},
          {"decoupling_ok", s.decoupling_ok},
          {"magnitude_ok", s.magnitude_ok},
          {"eps_inf", num(s.eps_inf)},
          {"nonlinear_ok", s.nonlinear_ok},
          {"nonlinear_margin", num(s.nonlinear_margin)},
          {"nonlinear_worst_omega", s.nonlinear_worst_omega},
          {"margins_d", margins_json(s.margins_d)},
          {"margins_q", margins_json(s.margins_q)},
          {"overall", s.overall()}}},
        {"mode",
         {{"label", analysis::to_string(m.mode)},
          {"vertex", analysis::to_string(m.vertex)},
          {"kappa", {m.kappa.kv, m.kappa.ktheta}},
          {"integrators", {m.integrators.d, m.integrators.q}},
          {"droop_d_ohm", num(m.droop_d)},
          {"droop_q_raw", num(m.droop_q_raw)},
          {"droop_q_rad_s_per_A", num(m.droop_q)},
          {"dist_gfl", m.dist_gfl},
          {"dist_kv_axis", m.dist_kv_axis},
          {"dist_ktheta_axis", m.dist_ktheta_axis},
          {"sync_ok", m.sync_ok},
          {"theta_bandwidth_rad_s", m.theta_bandwidth},
          {"theta_peak_db", m.theta_peak_db}}},
        {"sync",
         {{"ok", a.sync.ok},
          {"ratio_origin_zeros", a.sync.ratio_origin_zeros},
          {"k2q_origin_poles", a.sync.k2q_origin_poles}}},
        {"warnings", a.warnings},
    });
  }
  json root{{"schema_version", kSchemaVersion},
            {"kind", "analysis"},
            {"scenario", sc.name},
            {"pass", all},
            {"inverters", inv}};
  return root.dump(2) + "\n";
}

Loop loop_from(const std::string& n) {
  if (n == "d") return Loop::D;
  if (n == "q") return Loop::Q;
  if (n == "Ttheta" || n == "Tθ" || n == "theta") return Loop::Ttheta;
  if (n == "Tv") return Loop::Tv;
  if (n == "eps" || n == "ε") return Loop::Eps;
  if (n == "sigma" || n == "σ") return Loop::Sigma;
  throw Error(ErrorCode::UnknownLoop, "unknown loop '" + n + "' (expected d, q, Ttheta, Tv, eps, sigma)");
}

const char* to_string(Loop l) {
  switch (l) {
    case Loop::D: return "d";
    case Loop::Q: return "q";
    case Loop::Ttheta: return "Ttheta";
    case Loop::Tv: return "Tv";
    case Loop::Eps: return "eps";
    case Loop::Sigma: return "sigma";
  }
  return "?";
}

CsvTable bode(const sim::InverterConfig& cfg, Loop loop, const std::vector<double>& grid) {
  const analysis::Design d = design_of(cfg);
  switch (loop) {
    case Loop::D: return siso_table(analysis::open_loops(d).first, grid);
    case Loop::Q: return siso_table(analysis::open_loops(d).second, grid);
    case Loop::Ttheta:
    case Loop::Tv: {
      const auto GMt = synth::modified_plant(d.cs.params, d.line);
      const auto fs = analysis::freq_shape(d.cs, GMt(1, 1));
      return siso_table(loop == Loop::Ttheta ? fs.T_theta : fs.T_v, grid);
    }
    case Loop::Eps:
    case Loop::Sigma: {
      const auto fr = analysis::factorize(d.cs.KL, d.cs.K_tilde(), plant::line_tf(d.line), grid);
      CsvTable t;
      t.add("omega", "rad/s", fr.omega);
      t.add("f", "Hz", to_hz(fr.omega));
      if (loop == Loop::Eps) {
        t.add("eps", "1", fr.epsilon);
      } else {
        std::vector<double> hi, lo;
        for (const auto& S : fr.S) {
          const auto [a, b] = tf::singular_values(S);
          hi.push_back(20.0 * std::log10(a));
          lo.push_back(20.0 * std::log10(b));
        }
        t.add("sigma_max", "dB", hi);
        t.add("sigma_min", "dB", lo);
      }
      return t;
    }
  }
  throw Error(ErrorCode::UnknownLoop, "unknown loop");
}

std::string modes_text(const sim::InverterConfig& cfg) {
  const analysis::Design d = design_of(cfg);
  const auto m = analysis::classify_mode(d.cs);
  std::ostringstream o;
  o << "kappa_v = 0 | kappa_theta = 0 | d integrators | q integrators | mode\n"
    << "    no      |       no        |       0       |       1       | GFM\n"
    << "    yes     |       yes       |       1       |       2       | GFL\n"
    << "    yes     |       no        |       1       |       1       | STATCOM\n"
    << "    no      |       yes       |       0       |       2       | ESS\n\n";
  o << "inverter " << cfg.id << ": kappa = (" << m.kappa.kv << ", " << m.kappa.ktheta << ")\n"
    << "  mode " << analysis::to_string(m.mode) << " (vertex " << analysis::to_string(m.vertex) << ")\n"
    << "  integrators d=" << m.integrators.d << " q=" << m.integrators.q << "\n"
    << "  distance to GFL origin " << m.dist_gfl << ", to kappa_v = 0 axis " << m.dist_kv_axis
    << ", to kappa_theta = 0 axis " << m.dist_ktheta_axis << "\n"
    << "  droop d " << m.droop_d << " ohm, droop q " << m.droop_q << " (rad/s)/A\n"
    << "  T_theta bandwidth " << m.theta_bandwidth / (2.0 * M_PI) << " Hz, peak " << m.theta_peak_db << " dB\n"
    << "  presets: GFM (2, 0.02), GFL (0, 0), STATCOM (0, 0.02), ESS (2, 0), VSI (10, 0.5)\n";
  return o.str();
}

}  // namespace modeshift::io
