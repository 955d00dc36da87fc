#include "modeshift/sim/ramp_study.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modeshift/error.hpp"

namespace modeshift::sim {

namespace {

double shape_d(double kv, double Z) { return kv / (1.0 + Z * kv); }

// Mean over the samples in [t1 - span, t1].
double settled(const SimResult& r, const std::vector<double>& y, double t1, double span) {
  const size_t b = r.index_at(t1 - span), e = std::min(r.index_at(t1), y.size() - 1);
  double s = 0.0;
  size_t n = 0;
  for (size_t k = b; k <= e; ++k, ++n) s += y[k];
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace

double transient_energy(const SimResult& r, size_t inv, double Z, double rating, double t0, double window) {
  const InverterTrace& tr = r.inverters.at(inv);
  const double t1 = t0 + window, span = 0.02;
  const size_t i0 = r.index_at(t0), i1 = std::min(r.index_at(t1), r.t.size() - 1);
  if (i0 >= i1) throw Error(ErrorCode::InvalidParams, "energy window outside the run");

  // Endpoint calibration.
  const double kv_a = tr.kv[i0 > 0 ? i0 - 1 : 0], kv_b = tr.kv[i1];
  const double kt_a = tr.ktheta[i0 > 0 ? i0 - 1 : 0], kt_b = tr.ktheta[i1];
  const double ed_a = settled(r, tr.ep_d, t0, span), ed_b = settled(r, tr.ep_d, t1, span);
  const double eq_a = settled(r, tr.ep_q, t0, span), eq_b = settled(r, tr.ep_q, t1, span);
  double gd = 0.0, gq = 0.0;
  if (std::max(kv_a, kv_b) > 0.0)
    gd = kv_a >= kv_b ? ed_a / shape_d(kv_a, Z) : ed_b / shape_d(kv_b, Z);
  if (std::max(kt_a, kt_b) > 0.0) gq = kt_a >= kt_b ? eq_a / kt_a : eq_b / kt_b;

  const double dt = r.sample_period;
  double E = 0.0;
  for (size_t k = i0; k <= i1; ++k) {
    const double qd = gd * shape_d(tr.kv[k], Z), qq = gq * tr.ktheta[k];
    const double dd = (tr.ep_d[k] - qd) / rating, dq = (tr.ep_q[k] - qq) / rating;
    const double df = (tr.theta_dot[k] - r.bus.omega_g[k]) / (2.0 * M_PI);
    const double w = (k == i0 || k == i1) ? 0.5 : 1.0;
    E += w * (dd * dd + dq * dq + df * df) * dt;
  }
  return E;
}

RampReport mode_ramp_guard(const Scenario& base, const std::string& inverter, ModePoint from, ModePoint to,
                           double t_start, const std::vector<double>& durations, double window) {
  const int idx = base.inverter_index(inverter);
  if (idx < 0) throw Error(ErrorCode::Validation, "ramp study: unknown inverter '" + inverter + "'");
  RampReport rep;
  rep.from = from;
  rep.to = to;
  std::vector<Scenario> runs;
  for (double d : durations) {
    Scenario sc = base;
    auto& cfg = sc.inverters[static_cast<size_t>(idx)];
    cfg.kappa0 = from;
    cfg.mode_schedule.clear();
    cfg.mode_schedule.push_back({t_start, to, d});
    sc.solver.duration = std::max(sc.solver.duration, t_start + window + 1e-3);
    runs.push_back(std::move(sc));
  }
  const std::vector<SimResult> res = run_many(runs);
  const auto& cfg = base.inverters[static_cast<size_t>(idx)];
  for (size_t i = 0; i < durations.size(); ++i) {
    RampCase c;
    c.duration = durations[i];
    c.bounded = res[i].completed;
    c.failure = res[i].failure;
    c.energy = c.bounded ? transient_energy(res[i], static_cast<size_t>(idx), cfg.synth.line.Z(), cfg.inv.rating,
                                            t_start, window)
                         : INFINITY;
    rep.cases.push_back(c);
  }
  // Compare in order of increasing duration.
  std::vector<size_t> order(durations.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return durations[a] < durations[b]; });
  for (size_t k = 1; k < order.size(); ++k) {
    const RampCase &fast = rep.cases[order[k - 1]], &slow = rep.cases[order[k]];
    if (!(slow.energy <= fast.energy)) {
      rep.monotone = false;
      std::ostringstream os;
      os << "ramp " << slow.duration << " s energy " << slow.energy << " exceeds ramp " << fast.duration
         << " s energy " << fast.energy;
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace modeshift::sim
