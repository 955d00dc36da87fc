#include "modeshift/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "modeshift/error.hpp"
#include "modeshift/sim/simulator.hpp"

namespace modeshift::sim {

namespace {

struct KindName {
  EventKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {EventKind::GridVoltageStep, "grid_voltage_step"},
    {EventKind::GridFreqStep, "grid_freq_step"},
    {EventKind::GridFreqRamp, "grid_freq_ramp"},
    {EventKind::Islanding, "islanding"},
    {EventKind::Reconnect, "reconnect"},
    {EventKind::LoadStep, "load_step"},
    {EventKind::L2GFault, "l2g_fault"},
    {EventKind::SetpointStep, "setpoint_step"},
    {EventKind::ModeRamp, "mode_ramp"},
};

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::Validation, what); }

void check_params(const std::string& where, const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    fail(where + ": " + e.what());
  }
}

}  // namespace

Vec2 Setpoint::current(double v0) const {
  if (kind == Kind::Current) return {a, b};
  return plant::power_to_current(a, b, {v0, 0.0});
}

const char* to_string(EventKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "unknown";
}

std::optional<EventKind> event_kind_from(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  return std::nullopt;
}

int Scenario::inverter_index(const std::string& id) const {
  for (size_t i = 0; i < inverters.size(); ++i)
    if (inverters[i].id == id) return static_cast<int>(i);
  return -1;
}

void Scenario::validate() const {
  const SolverSettings& s = solver;
  if (!(s.physics_dt > 0.0)) fail("solver.physics_dt must be positive");
  if (!(s.control_Ts > 0.0)) fail("solver.control_Ts must be positive");
  const double ratio = s.control_Ts / s.physics_dt;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6)
    fail("solver.control_Ts must be an integer multiple of solver.physics_dt");
  if (!(s.duration > 0.0)) fail("solver.duration must be positive");
  if (s.decimation < 1) fail("solver.decimation must be >= 1");

  if (!(network.grid.v_mag > 0.0)) fail("network.grid.v_mag must be positive");
  if (!(network.grid.f_hz > 0.0)) fail("network.grid.f_hz must be positive");
  if (network.load.R && !(*network.load.R > 0.0)) fail("network.load.R must be positive");
  if (network.load.L && !(*network.load.L > 0.0)) fail("network.load.L must be positive");

  if (inverters.empty()) fail("at least one inverter is required");
  std::set<std::string> ids;
  for (size_t i = 0; i < inverters.size(); ++i) {
    const InverterConfig& c = inverters[i];
    const std::string where = "inverter '" + c.id + "'";
    if (c.id.empty()) fail("inverter " + std::to_string(i) + " has an empty id");
    if (!ids.insert(c.id).second) fail("duplicate inverter id '" + c.id + "'");
    check_params(where + ".filter", [&] { c.inv.validate(s.control_Ts); });
    check_params(where + ".line", [&] { c.line.validate(); });
    check_params(where + ".control", [&] { c.synth.validate(); });
    if (c.kappa0.kv < 0.0 || c.kappa0.ktheta < 0.0) fail(where + ".kappa must be >= 0");
    for (const auto& m : c.mode_schedule) {
      if (m.t_start < 0.0 || m.t_start > s.duration) fail(where + ".schedule time outside the run");
      if (m.ramp < 0.0) fail(where + ".schedule ramp must be >= 0");
      if (m.target.kv < 0.0 || m.target.ktheta < 0.0) fail(where + ".schedule kappa must be >= 0");
    }
  }

  bool islands = !network.breaker_closed;
  double prev = 0.0;
  for (size_t i = 0; i < events.size(); ++i) {
    const ScenarioEvent& e = events[i];
    const std::string where = std::string("event ") + std::to_string(i) + " (" + to_string(e.kind) + ")";
    if (e.t < prev) fail(where + " is not time-sorted");
    prev = e.t;
    if (e.t < 0.0 || e.t > s.duration) fail(where + " time outside [0, duration]");
    if (e.duration < 0.0) fail(where + " duration must be >= 0");
    switch (e.kind) {
      case EventKind::Islanding:
        islands = true;
        break;
      case EventKind::LoadStep:
        if (!(e.value > 0.0)) fail(where + " factor must be positive");
        break;
      case EventKind::L2GFault:
        if (e.value < 0.0 || e.value > 1.0) fail(where + " depth must lie in [0, 1]");
        break;
      case EventKind::SetpointStep:
        if (inverter_index(e.inverter) < 0) fail(where + " references unknown inverter '" + e.inverter + "'");
        if (!e.setpoint) fail(where + " needs a setpoint");
        break;
      case EventKind::ModeRamp:
        if (inverter_index(e.inverter) < 0) fail(where + " references unknown inverter '" + e.inverter + "'");
        if (!e.kappa) fail(where + " needs a kappa target");
        if (e.kappa->kv < 0.0 || e.kappa->ktheta < 0.0) fail(where + " kappa must be >= 0");
        break;
      default:
        break;
    }
  }
  if (islands && !network.load.R) fail("islanded operation requires network.load.R");

  for (const auto& o : outputs) {
    const bool bus = o.inverter.empty();
    const auto& names = bus ? BusTrace::signal_names() : InverterTrace::signal_names();
    if (std::find(names.begin(), names.end(), o.signal) == names.end())
      fail("output signal '" + o.signal + "' is unknown");
    if (!bus && inverter_index(o.inverter) < 0) fail("output references unknown inverter '" + o.inverter + "'");
    if (!(o.f_hz > 0.0)) fail("output frequency must be positive");
    if (o.window < 3.0 / o.f_hz) fail("output window must be >= 3 periods");
  }
}

InverterConfig default_inverter(const std::string& id, ModePoint kappa) {
  InverterConfig c;
  c.id = id;
  c.kappa0 = kappa;
  c.synth.v0 = c.inv.v0;
  c.synth.line = c.line;
  return c;
}

Scenario default_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.inverters.push_back(default_inverter("inv1", synth::preset("GFM")));
  return sc;
}

synth::SynthParams design_params(const InverterConfig& cfg) {
  synth::SynthParams p = cfg.synth;
  p.v0 = cfg.inv.v0;
  return synth::apply_mode_point(p, cfg.kappa0);
}

}  // namespace modeshift::sim
