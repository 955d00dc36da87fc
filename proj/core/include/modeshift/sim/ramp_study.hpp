#pragma once

#include <string>
#include <vector>

#include "modeshift/sim/simulator.hpp"

namespace modeshift::sim {

struct RampCase {
  double duration = 0.0;  // s
  double energy = 0.0;    // transient energy metric
  bool bounded = false;
  std::string failure;
};

struct RampReport {
  ModePoint from, to;
  std::vector<RampCase> cases;  // in the order of the requested durations
  bool monotone = true;         // energy non-increasing as ramps get slower
  std::vector<std::string> violations;
};

// Transient energy of one inverter over [t0, t0 + window]:
//   integral of |e' - e'_qs(kappa(t))|^2 / I_base^2 + ((theta_dot - omega_g) / 2 pi)^2 dt.
// The quasi-static reference scales with kappa: e'^d ~ kv / (1 + Z kv),
// e'^q ~ ktheta. Each gain is calibrated from the settled e' just before t0
// or at the window end, whichever endpoint has the larger kappa component.
double transient_energy(const SimResult& r, size_t inverter, double Z, double rating, double t0,
                        double window);

// Runs base with an added mode ramp of inverter `inverter` from `from` to
// `to` starting at t_start, once per duration (concurrently), and compares
// the transient energy over a common window. `base` should start in `from`.
RampReport mode_ramp_guard(const Scenario& base, const std::string& inverter, ModePoint from, ModePoint to,
                           double t_start, const std::vector<double>& durations, double window);

}  // namespace modeshift::sim
