#include <cmath>
#include <limits>

#include "modeshift/analysis/analysis.hpp"
#include "modeshift/error.hpp"

namespace modeshift::analysis {

using tf::Polynomial;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// lim_{s->0} s^k f(s) with literal origin factors removed first.
double limit_times_s(const RationalTF& f, int k) {
  const int order = k + f.origin_zeros() - f.origin_poles();
  if (order > 0) return 0.0;
  const double v = f.num().strip_origin()(0.0) / f.den().strip_origin()(0.0);
  if (order < 0) return std::copysign(kInf, v);
  return v;
}

Mode vertex_of(synth::IntegratorCounts c) {
  if (c.d == 0 && c.q == 1) return Mode::GFM;
  if (c.d == 0 && c.q >= 2) return Mode::ESS;
  if (c.d >= 1 && c.q == 1) return Mode::STATCOM;
  return Mode::GFL;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::GFM: return "GFM";
    case Mode::GFL: return "GFL";
    case Mode::STATCOM: return "STATCOM";
    case Mode::ESS: return "ESS";
    case Mode::Intermediate: return "intermediate";
  }
  return "?";
}

SyncDiagnostics sync_check(const RationalTF& K1q, const RationalTF& K2q) {
  SyncDiagnostics d;
  d.ratio_origin_zeros = K1q.origin_zeros() + K2q.origin_poles() - K1q.origin_poles() - K2q.origin_zeros();
  d.k2q_origin_poles = K2q.origin_poles() - K2q.origin_zeros();
  d.ok = d.ratio_origin_zeros >= 2 && d.k2q_origin_poles >= 1;
  return d;
}

FreqShape freq_shape(const ControllerSet& cs, const RationalTF& G) {
  FreqShape fs;
  fs.T_theta = synth::theta_tf(G, cs.K1q, cs.K2q);
  fs.T_v = {G.num() * cs.K1q.num() * cs.K2q.den(), fs.T_theta.den()};
  const RationalTF Sq = {G.den() * cs.K1q.den() * cs.K2q.den(), fs.T_theta.den()};
  fs.bandwidth = synth::minus3db_bandwidth(fs.T_theta, 1e-2, 1e5);
  double peak = 0.0;
  for (double w : tf::log_grid(1e-2, 1e5, 200)) peak = std::max(peak, std::abs(fs.T_theta.at(w)));
  fs.M_T_db = 20.0 * std::log10(peak);
  for (double w : tf::log_grid(1e-1, 1e5, 7))
    fs.identity_residual = std::max(fs.identity_residual,
                                    std::abs(fs.T_theta.at(w) + fs.T_v.at(w) + Sq.at(w) - 1.0));
  return fs;
}

ModeReport classify_mode(const ControllerSet& cs, const ModeOptions& opt) {
  ModeReport r;
  const synth::SynthParams& p = cs.params;
  r.kappa = p.kappa();
  r.integrators = cs.structural_integrators;
  r.vertex = vertex_of(r.integrators);
  r.mode = r.vertex;
  const bool small_v = r.kappa.kv > 0.0 && r.kappa.kv < opt.intermediate_kappa;
  const bool small_t = r.kappa.ktheta > 0.0 && r.kappa.ktheta < opt.intermediate_kappa;
  if (small_v || small_t) r.mode = Mode::Intermediate;
  r.dist_gfl = std::hypot(r.kappa.kv, r.kappa.ktheta);
  r.dist_kv_axis = r.kappa.kv;
  r.dist_ktheta_axis = r.kappa.ktheta;

  const TransferMatrix2 GMt = synth::modified_plant(p, p.line);
  if (r.integrators.d > 0) {
    r.droop_d = kInf;
  } else {
    r.droop_d = 1.0 / GMt(0, 0).at(0.0).real() + limit_times_s(cs.Kd, 0);
  }
  r.droop_q_raw = r.integrators.q >= 2 ? kInf : limit_times_s(cs.Kq(), 1);
  r.droop_q = r.droop_q_raw / p.v0;

  r.sync_ok = sync_check(cs).ok;
  const FreqShape fs = freq_shape(cs, GMt(1, 1));
  r.theta_bandwidth = fs.bandwidth;
  r.theta_peak_db = fs.M_T_db;
  return r;
}

SteadyError steady_state_error(const ModeReport& m, double dv, double dw, double v0) {
  return {std::isinf(m.droop_d) ? 0.0 : dv / m.droop_d,
          std::isinf(m.droop_q_raw) ? 0.0 : v0 * dw / m.droop_q_raw};
}

SharingTable sharing_ratios(const std::vector<Design>& designs) {
  if (designs.size() < 2) throw Error(ErrorCode::InvalidParams, "sharing needs at least two designs");
  std::vector<double> dd, dq;
  for (const auto& d : designs) {
    synth::ControllerSet cs = d.cs;
    const ModeReport m = classify_mode(cs);
    if (m.vertex != Mode::GFM) throw Error(ErrorCode::NonGfmDesign, "sharing requires GFM designs");
    const TransferMatrix2 GMt = synth::modified_plant(cs.params, d.line);
    dd.push_back(1.0 / GMt(0, 0).at(0.0).real() + limit_times_s(cs.Kd, 0));
    dq.push_back(m.droop_q_raw);
  }
  const size_t n = designs.size();
  SharingTable t;
  t.ratio_d.assign(n, std::vector<double>(n));
  t.ratio_q.assign(n, std::vector<double>(n));
  double sd = 0.0, sq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sd += 1.0 / dd[i];
    sq += 1.0 / dq[i];
    for (size_t j = 0; j < n; ++j) {
      t.ratio_d[i][j] = dd[j] / dd[i];
      t.ratio_q[i][j] = dq[j] / dq[i];
    }
  }
  for (size_t i = 0; i < n; ++i) {
    t.weight_d.push_back(1.0 / dd[i] / sd);
    t.weight_q.push_back(1.0 / dq[i] / sq);
  }
  return t;
}

}  // namespace modeshift::analysis
