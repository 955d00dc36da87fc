#pragma once

#include <array>
#include <vector>

#include "modeshift/sim/discrete_block.hpp"
#include "modeshift/sim/scenario.hpp"
#include "modeshift/synth/cascade.hpp"

namespace modeshift::sim {

// Physical states of one inverter, in the frame rotating at omega0.
struct PhysicalState {
  Vec2 iL{};
  Vec2 vc{};
  Vec2 ig{};
};

// Quantities of the last control update, in the inverter's own dq frame.
struct ControlOutput {
  Vec2 m_global{};  // held modulation
  Vec2 ig{}, vc{}, iL{};
  Vec2 e_prime{};
  double theta = 0.0;      // wrapped to [0, 2 pi)
  double theta_dot = 0.0;  // rad/s
  double u_theta = 0.0;    // V
  double P = 0.0, Q = 0.0;
  ModePoint kappa;
  bool saturated = false;
};

// Discretized controller of one inverter: K_L, K_c (with PR), the voltage
// and current loops with decoupling feedforward, and the K2q angle path.
class InverterUnit {
 public:
  InverterUnit(const InverterConfig& cfg, double control_Ts);

  // One control update at time t from global-frame measurements.
  const ControlOutput& control(double t, const PhysicalState& meas);

  void set_setpoint(const Setpoint& sp) { setpoint_ = sp; }
  // Linear kappa ramp from the current value, starting at t.
  void schedule_mode(double t, ModePoint target, double ramp);

  const InverterConfig& config() const { return cfg_; }
  const synth::SynthParams& params() const { return p_; }
  const synth::CascadeRealization& cascade() const { return cas_; }
  const ControlOutput& last() const { return out_; }
  ModePoint kappa() const { return kappa_; }
  bool finite() const;
  // Equilibrium physical state for nominal voltage and zero current.
  PhysicalState nominal_state() const;

 private:
  ModePoint kappa_at(double t) const;
  void apply_kappa(ModePoint k);

  InverterConfig cfg_;
  synth::SynthParams p_;  // omega_theta resolved
  synth::CascadeRealization cas_;
  double Ts_;
  Setpoint setpoint_;
  std::vector<ModeStep> schedule_;  // sorted by start time
  ModePoint kappa_;

  std::array<std::optional<DiscreteBlock>, 4> KL_;  // row-major, empty = zero entry
  BlockChain Kc_d_, Kc_q_;
  BlockChain K2q_;  // low-pass, lag (scheduled), integrator
  DiscreteBlock Kv_d_, Kv_q_, Ki_d_, Ki_q_;
  std::optional<DiscreteBlock> ff_d_, ff_q_;  // derivative part of the inverse
  double y2_ = 0.0;  // output of the K2q lag section
  ControlOutput out_;
};

}  // namespace modeshift::sim
