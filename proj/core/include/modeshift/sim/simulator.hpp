#pragma once

#include <map>
#include <string>
#include <vector>

#include "modeshift/sim/inverter.hpp"
#include "modeshift/sim/scenario.hpp"

namespace modeshift::sim {

// Per-inverter recorded series, dq quantities in the inverter's own frame.
struct InverterTrace {
  std::string id;
  std::vector<double> ig_d, ig_q, vc_d, vc_q, iL_d, iL_q;
  std::vector<double> ep_d, ep_q;  // shaped error e'
  std::vector<double> theta, theta_dot, u_theta;
  std::vector<double> P, Q;
  std::vector<double> kv, ktheta;
  std::vector<double> m_d, m_q;
  std::vector<double> saturated;

  // Named access for spectral extracts and CSV columns.
  const std::vector<double>* signal(const std::string& name) const;
  static const std::vector<std::string>& signal_names();
};

// Bus quantities in the frame rotating at omega0.
struct BusTrace {
  std::vector<double> vg_d, vg_q, vg_mag, omega_g, breaker, i_load;
  const std::vector<double>* signal(const std::string& name) const;
  static const std::vector<std::string>& signal_names();
};

struct SpectralTrace {
  SpectralRequest request;
  std::vector<double> t, magnitude;
};

struct SimResult {
  std::vector<double> t;
  std::vector<InverterTrace> inverters;
  BusTrace bus;
  std::vector<SpectralTrace> spectral;
  bool completed = false;
  std::string failure;  // divergence diagnostic when !completed
  double sample_period = 0.0;

  size_t index_at(double time) const;  // first sample with t >= time
  const InverterTrace& inverter(const std::string& id) const;
};

// Bus voltage for the given physical states. Connected: the stiff grid
// source. Islanded: v_g = R_load (sum i_g - i_load_L).
Vec2 bus_solve(bool breaker_closed, Vec2 grid_source, const LoadConfig& load,
               const std::vector<PhysicalState>& states, Vec2 i_load_L);

class Simulator {
 public:
  explicit Simulator(const Scenario& sc);

  // Advances one control period: events, control update, physics substeps.
  void step();
  // Runs to the end of the scenario. On divergence, throws
  // Error(NumericalDivergence) carrying the time and the last event.
  SimResult run();
  // Like run(), but returns the partial result flagged !completed.
  SimResult run_partial();

  double time() const { return t_; }
  const std::vector<PhysicalState>& states() const { return x_; }
  const std::vector<InverterUnit>& units() const { return units_; }
  Vec2 bus_voltage() const;

 private:
  struct Grid {
    double v_mag, omega, delta = 0.0;  // delta: angle w.r.t. the omega0 frame
    double ramp_rate = 0.0, ramp_end = 0.0;
    double fault_depth = 0.0, fault_end = -1.0;
  };

  void apply_events(double t_now);
  Vec2 grid_source(double tau) const;  // tau: offset from t_
  void physics_step(double dt);
  void advance_grid(double dt);
  void record();
  void check_divergence();
  std::string context() const;

  Scenario sc_;
  std::vector<InverterUnit> units_;
  std::vector<PhysicalState> x_;
  Vec2 i_load_L_{};
  Grid grid_;
  bool breaker_;
  LoadConfig load_;
  double t_ = 0.0;
  long step_count_ = 0;
  size_t next_event_ = 0;
  std::vector<ScenarioEvent> events_;
  std::string last_event_ = "start";
  int substeps_;
  double dt_;
  SimResult res_;
  double prev_bus_angle_ = 0.0;
  double omega_bus_filt_;
  bool have_bus_angle_ = false;
};

SimResult run(const Scenario& sc);
// Independent scenarios on separate threads; results in input order.
std::vector<SimResult> run_many(const std::vector<Scenario>& scenarios, unsigned threads = 0);

}  // namespace modeshift::sim
