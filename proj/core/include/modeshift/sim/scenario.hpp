#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modeshift/plant/plant.hpp"
#include "modeshift/synth/synth.hpp"

namespace modeshift::sim {

using plant::Vec2;
using synth::ModePoint;

struct GridConfig {
  double v_mag = plant::InverterParams{}.v0;  // V, peak phase
  double f_hz = 60.0;
  bool operator==(const GridConfig&) const = default;
};

struct LoadConfig {
  std::optional<double> R;  // ohm at the PCC
  std::optional<double> L;  // H, parallel branch
  bool operator==(const LoadConfig&) const = default;
};

struct NetworkConfig {
  GridConfig grid;
  bool breaker_closed = true;
  LoadConfig load;
  bool operator==(const NetworkConfig&) const = default;
};

// Current setpoints in A, or power setpoints in W/var mapped through the
// three-phase current map at nominal terminal voltage (v0, 0).
struct Setpoint {
  enum class Kind { Current, Power };
  Kind kind = Kind::Current;
  double a = 0.0;  // i0_d or P0
  double b = 0.0;  // i0_q or Q0
  Vec2 current(double v0) const;
  bool operator==(const Setpoint&) const = default;
};

struct ModeStep {
  double t_start = 0.0;  // s
  ModePoint target;
  double ramp = 0.0;  // s, 0 = jump
  bool operator==(const ModeStep&) const = default;
};

struct InverterConfig {
  std::string id;
  plant::InverterParams inv;
  plant::LineParams line;
  synth::SynthParams synth;  // synth.line is the design line for K_L
  ModePoint kappa0;
  Setpoint setpoint;
  std::vector<ModeStep> mode_schedule;
  bool operator==(const InverterConfig&) const = default;
};

enum class EventKind {
  GridVoltageStep,  // value: dv in pu of v0
  GridFreqStep,     // value: df in Hz
  GridFreqRamp,     // value: Hz/s, duration: s
  Islanding,
  Reconnect,
  LoadStep,   // value: load multiplier (2 = twice the current)
  L2GFault,   // value: depth in [0, 1], duration: s
  SetpointStep,
  ModeRamp,   // kappa over duration
};

const char* to_string(EventKind k);
std::optional<EventKind> event_kind_from(const std::string& s);

struct ScenarioEvent {
  double t = 0.0;
  EventKind kind = EventKind::GridFreqStep;
  double value = 0.0;
  double duration = 0.0;
  std::string inverter;  // id, for setpoint_step and mode_ramp
  std::optional<Setpoint> setpoint;
  std::optional<ModePoint> kappa;
  bool operator==(const ScenarioEvent&) const = default;
};

struct SolverSettings {
  double physics_dt = 2e-6;
  double control_Ts = 20e-6;
  double duration = 1.0;
  int decimation = 10;  // control steps per recorded sample
  unsigned seed = 0;
  bool operator==(const SolverSettings&) const = default;
};

struct SpectralRequest {
  std::string signal;    // e.g. "ig_d", "theta_dot"; bus: "vg_d", "vg_q"
  std::string inverter;  // empty for bus signals
  double f_hz = 120.0;
  double window = 0.05;  // s
  bool operator==(const SpectralRequest&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  NetworkConfig network;
  std::vector<InverterConfig> inverters;
  std::vector<ScenarioEvent> events;
  SolverSettings solver;
  std::vector<SpectralRequest> outputs;

  // Throws Error(Validation) naming the offending field.
  void validate() const;
  int inverter_index(const std::string& id) const;  // -1 when absent
  bool operator==(const Scenario&) const = default;
};

// Synthesis parameters the controller of cfg is built from: v0 from the
// inverter, betas from kappa0.
synth::SynthParams design_params(const InverterConfig& cfg);

// Single grid-connected inverter with the nominal filter and line values.
Scenario default_scenario(const std::string& name = "default");
InverterConfig default_inverter(const std::string& id, ModePoint kappa);

}  // namespace modeshift::sim
