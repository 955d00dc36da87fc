#include "modeshift/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <sstream>
#include <thread>

#include "modeshift/error.hpp"
#include "modeshift/sim/spectral.hpp"

namespace modeshift::sim {

namespace {

Vec2 jmul(Vec2 x) { return {-x[1], x[0]}; }

template <class T>
const std::vector<double>* lookup(const T& table, const std::string& name) {
  for (const auto& [n, v] : table)
    if (n == name) return v;
  return nullptr;
}

}  // namespace

// ---- traces

const std::vector<std::string>& InverterTrace::signal_names() {
  static const std::vector<std::string> names{
      "ig_d", "ig_q", "vc_d", "vc_q", "iL_d", "iL_q", "ep_d", "ep_q", "theta", "theta_dot",
      "u_theta", "P", "Q", "kv", "ktheta", "m_d", "m_q", "saturated"};
  return names;
}

const std::vector<double>* InverterTrace::signal(const std::string& name) const {
  const std::pair<const char*, const std::vector<double>*> table[] = {
      {"ig_d", &ig_d}, {"ig_q", &ig_q}, {"vc_d", &vc_d}, {"vc_q", &vc_q},
      {"iL_d", &iL_d}, {"iL_q", &iL_q}, {"ep_d", &ep_d}, {"ep_q", &ep_q},
      {"theta", &theta}, {"theta_dot", &theta_dot}, {"u_theta", &u_theta}, {"P", &P},
      {"Q", &Q}, {"kv", &kv}, {"ktheta", &ktheta}, {"m_d", &m_d}, {"m_q", &m_q},
      {"saturated", &saturated}};
  return lookup(table, name);
}

const std::vector<std::string>& BusTrace::signal_names() {
  static const std::vector<std::string> names{"vg_d", "vg_q", "vg_mag", "omega_g", "breaker", "i_load"};
  return names;
}

const std::vector<double>* BusTrace::signal(const std::string& name) const {
  const std::pair<const char*, const std::vector<double>*> table[] = {
      {"vg_d", &vg_d}, {"vg_q", &vg_q}, {"vg_mag", &vg_mag},
      {"omega_g", &omega_g}, {"breaker", &breaker}, {"i_load", &i_load}};
  return lookup(table, name);
}

size_t SimResult::index_at(double time) const {
  return static_cast<size_t>(std::lower_bound(t.begin(), t.end(), time - 1e-12) - t.begin());
}

const InverterTrace& SimResult::inverter(const std::string& id) const {
  for (const auto& tr : inverters)
    if (tr.id == id) return tr;
  throw Error(ErrorCode::Validation, "no trace for inverter '" + id + "'");
}

// ---- bus

Vec2 bus_solve(bool breaker_closed, Vec2 grid_source, const LoadConfig& load,
               const std::vector<PhysicalState>& states, Vec2 i_load_L) {
  if (breaker_closed) return grid_source;
  if (!load.R) throw Error(ErrorCode::Validation, "islanded bus without a resistive load");
  Vec2 sum{-i_load_L[0], -i_load_L[1]};
  for (const auto& s : states) {
    sum[0] += s.ig[0];
    sum[1] += s.ig[1];
  }
  return {*load.R * sum[0], *load.R * sum[1]};
}

// ---- simulator

Simulator::Simulator(const Scenario& sc) : sc_(sc), breaker_(sc.network.breaker_closed), load_(sc.network.load) {
  sc_.validate();
  dt_ = sc_.solver.physics_dt;
  substeps_ = static_cast<int>(std::lround(sc_.solver.control_Ts / dt_));
  units_.reserve(sc_.inverters.size());
  for (const auto& c : sc_.inverters) {
    units_.emplace_back(c, sc_.solver.control_Ts);
    x_.push_back(units_.back().nominal_state());
  }
  grid_.v_mag = sc_.network.grid.v_mag;
  grid_.omega = 2.0 * M_PI * sc_.network.grid.f_hz;
  omega_bus_filt_ = grid_.omega;
  events_ = sc_.events;
  res_.inverters.resize(units_.size());
  for (size_t i = 0; i < units_.size(); ++i) res_.inverters[i].id = sc_.inverters[i].id;
  res_.sample_period = sc_.solver.control_Ts * sc_.solver.decimation;
}

Vec2 Simulator::grid_source(double tau) const {
  const double w0 = sc_.inverters.front().line.omega0;
  const double ang = grid_.delta + (grid_.omega - w0) * tau +
                     (t_ + tau < grid_.ramp_end ? 0.5 * grid_.ramp_rate * tau * tau : 0.0);
  double vpos = grid_.v_mag;
  Vec2 v{0.0, 0.0};
  const bool fault = grid_.fault_depth > 0.0 && (grid_.fault_end < 0.0 || t_ + tau < grid_.fault_end);
  if (fault) {
    // Single line-to-ground sag: positive sequence reduced by depth/3 and a
    // negative-sequence term of the same size, seen at 2 omega0 here.
    const double a2 = grid_.fault_depth / 3.0 * grid_.v_mag;
    vpos -= a2;
    const double neg = 2.0 * w0 * (t_ + tau) + ang;
    v = {-a2 * std::cos(neg), a2 * std::sin(neg)};
  }
  return {v[0] + vpos * std::cos(ang), v[1] + vpos * std::sin(ang)};
}

Vec2 Simulator::bus_voltage() const { return bus_solve(breaker_, grid_source(0.0), load_, x_, i_load_L_); }

void Simulator::advance_grid(double dt) {
  const double w0 = sc_.inverters.front().line.omega0;
  double rate = 0.0;
  if (t_ < grid_.ramp_end) rate = grid_.ramp_rate;
  grid_.delta += (grid_.omega - w0) * dt + 0.5 * rate * dt * dt;
  grid_.omega += rate * dt;
  grid_.delta = std::remainder(grid_.delta, 2.0 * M_PI);
}

void Simulator::apply_events(double t_now) {
  const double v0n = sc_.network.grid.v_mag;
  while (next_event_ < events_.size() && events_[next_event_].t <= t_now + 0.5 * dt_) {
    const ScenarioEvent& e = events_[next_event_++];
    std::ostringstream os;
    os << to_string(e.kind) << " at t=" << e.t;
    last_event_ = os.str();
    switch (e.kind) {
      case EventKind::GridVoltageStep:
        grid_.v_mag += e.value * v0n;
        break;
      case EventKind::GridFreqStep:
        grid_.omega += 2.0 * M_PI * e.value;
        break;
      case EventKind::GridFreqRamp:
        grid_.ramp_rate = 2.0 * M_PI * e.value;
        grid_.ramp_end = t_now + e.duration;
        break;
      case EventKind::Islanding:
        breaker_ = false;
        break;
      case EventKind::Reconnect:
        breaker_ = true;
        break;
      case EventKind::LoadStep:
        if (load_.R) *load_.R /= e.value;
        if (load_.L) *load_.L /= e.value;
        break;
      case EventKind::L2GFault:
        grid_.fault_depth = e.value;
        grid_.fault_end = e.duration > 0.0 ? t_now + e.duration : -1.0;
        break;
      case EventKind::SetpointStep:
        units_[static_cast<size_t>(sc_.inverter_index(e.inverter))].set_setpoint(*e.setpoint);
        break;
      case EventKind::ModeRamp:
        units_[static_cast<size_t>(sc_.inverter_index(e.inverter))].schedule_mode(t_now, *e.kappa, e.duration);
        break;
    }
  }
}

void Simulator::physics_step(double dt) {
  const size_t n = x_.size();
  const double w0 = sc_.inverters.front().line.omega0;
  struct Deriv {
    std::vector<PhysicalState> dx;
    Vec2 dload{};
  };
  auto f = [&](double tau, const std::vector<PhysicalState>& x, Vec2 il, Deriv& d) {
    const Vec2 vg = bus_solve(breaker_, breaker_ ? grid_source(tau) : Vec2{}, load_, x, il);
    for (size_t i = 0; i < n; ++i) {
      const InverterConfig& c = sc_.inverters[i];
      const PhysicalState& s = x[i];
      const Vec2 m = units_[i].last().m_global;
      const double Li = c.inv.Li, Ri = c.inv.Ri, Ci = c.inv.Ci, L = c.line.L, R = c.line.R;
      const double hv = 0.5 * c.inv.vdc;
      const Vec2 jiL = jmul(s.iL), jvc = jmul(s.vc), jig = jmul(s.ig);
      PhysicalState& o = d.dx[i];
      for (int k = 0; k < 2; ++k) {
        o.iL[k] = (hv * m[k] - s.vc[k] - Ri * s.iL[k]) / Li - w0 * jiL[k];
        o.vc[k] = (s.iL[k] - s.ig[k]) / Ci - w0 * jvc[k];
        o.ig[k] = (s.vc[k] - vg[k] - R * s.ig[k]) / L - w0 * jig[k];
      }
    }
    if (load_.L && !breaker_) {
      const Vec2 jil = jmul(il);
      d.dload = {vg[0] / *load_.L - w0 * jil[0], vg[1] / *load_.L - w0 * jil[1]};
    } else {
      d.dload = {0.0, 0.0};
    }
  };
  static thread_local Deriv k1, k2, k3, k4;
  static thread_local std::vector<PhysicalState> tmp;
  for (Deriv* d : {&k1, &k2, &k3, &k4}) d->dx.resize(n);
  tmp.resize(n);
  auto axpy = [&](const Deriv& d, double h) {
    for (size_t i = 0; i < n; ++i)
      for (int k = 0; k < 2; ++k) {
        tmp[i].iL[k] = x_[i].iL[k] + h * d.dx[i].iL[k];
        tmp[i].vc[k] = x_[i].vc[k] + h * d.dx[i].vc[k];
        tmp[i].ig[k] = x_[i].ig[k] + h * d.dx[i].ig[k];
      }
    return Vec2{i_load_L_[0] + h * d.dload[0], i_load_L_[1] + h * d.dload[1]};
  };
  f(0.0, x_, i_load_L_, k1);
  Vec2 il = axpy(k1, 0.5 * dt);
  f(0.5 * dt, tmp, il, k2);
  il = axpy(k2, 0.5 * dt);
  f(0.5 * dt, tmp, il, k3);
  il = axpy(k3, dt);
  f(dt, tmp, il, k4);
  const double h6 = dt / 6.0;
  for (size_t i = 0; i < n; ++i)
    for (int k = 0; k < 2; ++k) {
      x_[i].iL[k] += h6 * (k1.dx[i].iL[k] + 2 * k2.dx[i].iL[k] + 2 * k3.dx[i].iL[k] + k4.dx[i].iL[k]);
      x_[i].vc[k] += h6 * (k1.dx[i].vc[k] + 2 * k2.dx[i].vc[k] + 2 * k3.dx[i].vc[k] + k4.dx[i].vc[k]);
      x_[i].ig[k] += h6 * (k1.dx[i].ig[k] + 2 * k2.dx[i].ig[k] + 2 * k3.dx[i].ig[k] + k4.dx[i].ig[k]);
    }
  for (int k = 0; k < 2; ++k)
    i_load_L_[k] += h6 * (k1.dload[k] + 2 * k2.dload[k] + 2 * k3.dload[k] + k4.dload[k]);
  advance_grid(dt);
  t_ += dt;
}

void Simulator::record() {
  res_.t.push_back(t_);
  for (size_t i = 0; i < units_.size(); ++i) {
    const ControlOutput& o = units_[i].last();
    InverterTrace& tr = res_.inverters[i];
    tr.ig_d.push_back(o.ig[0]);
    tr.ig_q.push_back(o.ig[1]);
    tr.vc_d.push_back(o.vc[0]);
    tr.vc_q.push_back(o.vc[1]);
    tr.iL_d.push_back(o.iL[0]);
    tr.iL_q.push_back(o.iL[1]);
    tr.ep_d.push_back(o.e_prime[0]);
    tr.ep_q.push_back(o.e_prime[1]);
    tr.theta.push_back(o.theta);
    tr.theta_dot.push_back(o.theta_dot);
    tr.u_theta.push_back(o.u_theta);
    tr.P.push_back(o.P);
    tr.Q.push_back(o.Q);
    tr.kv.push_back(o.kappa.kv);
    tr.ktheta.push_back(o.kappa.ktheta);
    const double phi = o.u_theta / units_[i].params().v0;
    const double c = std::cos(phi), s = std::sin(phi);
    tr.m_d.push_back(c * o.m_global[0] + s * o.m_global[1]);
    tr.m_q.push_back(-s * o.m_global[0] + c * o.m_global[1]);
    tr.saturated.push_back(o.saturated ? 1.0 : 0.0);
  }
  const Vec2 vg = bus_voltage();
  BusTrace& b = res_.bus;
  b.vg_d.push_back(vg[0]);
  b.vg_q.push_back(vg[1]);
  b.vg_mag.push_back(std::hypot(vg[0], vg[1]));
  // Bus frequency from the voltage angle, low-pass filtered (5 ms).
  const double w0 = sc_.inverters.front().line.omega0;
  const double ang = std::atan2(vg[1], vg[0]);
  if (have_bus_angle_ && b.vg_mag.back() > 1e-6) {
    const double raw = w0 + std::remainder(ang - prev_bus_angle_, 2.0 * M_PI) / res_.sample_period;
    const double a = res_.sample_period / (5e-3 + res_.sample_period);
    omega_bus_filt_ += a * (raw - omega_bus_filt_);
  }
  prev_bus_angle_ = ang;
  have_bus_angle_ = true;
  b.omega_g.push_back(breaker_ ? grid_.omega : omega_bus_filt_);
  b.breaker.push_back(breaker_ ? 1.0 : 0.0);
  double iload = 0.0;
  if (!breaker_ && load_.R) iload = std::hypot(vg[0], vg[1]) / *load_.R;
  b.i_load.push_back(iload);
}

std::string Simulator::context() const {
  std::ostringstream os;
  os << "t=" << t_ << " s, last event: " << last_event_;
  return os.str();
}

void Simulator::check_divergence() {
  for (size_t i = 0; i < x_.size(); ++i) {
    const double limit = 1e6 * sc_.inverters[i].inv.rating;
    const PhysicalState& s = x_[i];
    for (double v : {s.iL[0], s.iL[1], s.vc[0], s.vc[1], s.ig[0], s.ig[1]})
      if (!std::isfinite(v) || std::abs(v) > limit)
        throw Error(ErrorCode::NumericalDivergence,
                    "state of inverter '" + sc_.inverters[i].id + "' diverged (" + context() + ")");
    if (!units_[i].finite())
      throw Error(ErrorCode::NumericalDivergence,
                  "controller of inverter '" + sc_.inverters[i].id + "' diverged (" + context() + ")");
  }
}

void Simulator::step() {
  apply_events(t_);
  for (size_t i = 0; i < units_.size(); ++i) units_[i].control(t_, x_[i]);
  if (step_count_ % sc_.solver.decimation == 0) record();
  for (int k = 0; k < substeps_; ++k) {
    if (k > 0) apply_events(t_);
    physics_step(dt_);
  }
  ++step_count_;
  check_divergence();
}

SimResult Simulator::run_partial() {
  const long n = std::lround(sc_.solver.duration / sc_.solver.control_Ts);
  try {
    while (step_count_ < n) step();
    // Final sample at the end time.
    apply_events(t_);
    for (size_t i = 0; i < units_.size(); ++i) units_[i].control(t_, x_[i]);
    record();
    res_.completed = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalDivergence) throw;
    res_.completed = false;
    res_.failure = e.what();
  }
  for (const auto& req : sc_.outputs) {
    const std::vector<double>* series =
        req.inverter.empty() ? res_.bus.signal(req.signal) : res_.inverter(req.inverter).signal(req.signal);
    SpectralTrace tr;
    tr.request = req;
    if (series && series->size() > 1) {
      const SpectralResult s = spectral_extract(*series, res_.sample_period, req.f_hz, req.window);
      tr.magnitude = s.magnitude;
      tr.t.reserve(s.end_index.size());
      for (size_t k : s.end_index) tr.t.push_back(res_.t[k]);
    }
    res_.spectral.push_back(std::move(tr));
  }
  return res_;
}

SimResult Simulator::run() {
  SimResult r = run_partial();
  if (!r.completed) throw Error(ErrorCode::NumericalDivergence, r.failure);
  return r;
}

SimResult run(const Scenario& sc) { return Simulator(sc).run(); }

std::vector<SimResult> run_many(const std::vector<Scenario>& scenarios, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SimResult> out(scenarios.size());
  std::vector<std::exception_ptr> errs(scenarios.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
      try {
        out[i] = Simulator(scenarios[i]).run_partial();
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::min<size_t>(threads, scenarios.size()); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace modeshift::sim
