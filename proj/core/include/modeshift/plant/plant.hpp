#pragma once

#include <array>
#include <cmath>

#include "modeshift/tfcore/transfer_matrix.hpp"

namespace modeshift::plant {

using Vec2 = std::array<double, 2>;

struct LineParams {
  double R = 1e-3;             // ohm
  double L = 1e-3;             // H
  double omega0 = 2 * M_PI * 60.0;  // rad/s

  double lambda() const { return R / L; }
  double Z() const { return std::hypot(R, L * omega0); }
  double phi_z() const { return std::atan2(L * omega0, R); }
  void validate() const;
  bool operator==(const LineParams&) const = default;
};

struct InverterParams {
  double Li = 1e-3;      // H
  double Ri = 0.05;      // ohm
  double Ci = 15e-6;     // F
  double vdc = 400.0;    // V
  double v0 = 120.0 * M_SQRT2 / std::sqrt(3.0);  // V, peak phase = d-axis magnitude
  double omega_c = 2 * M_PI * 1000.0;            // rad/s
  double rating = 10.0;  // A, per-unit base current
  // Feed the grid current forward through a filtered inverse of the inner
  // current loop instead of directly, so its lag does not turn into source
  // impedance.
  bool ig_ff_inverse = true;

  double s_base() const { return 1.5 * v0 * rating; }
  double z_base() const { return v0 / rating; }
  // ωc must sit below the Nyquist rate of the given sample time.
  void validate(double control_Ts) const;
  bool operator==(const InverterParams&) const = default;
};

struct PowerFlowPoint {
  double vc_mag, vg_mag, delta, P, Q;
};

enum class Phases { Single, Three };

tf::TransferMatrix2 line_tf(const LineParams& p);

// Power delivered at the grid end of the line; δ = θg − θ.
std::pair<double, double> steady_power_flow(double vc_mag, double vg_mag, double delta,
                                            const LineParams& line);

// Reference droop law in the rotated frame of the line impedance angle.
std::pair<double, double> universal_droop(double P, double Q, double P0, double Q0, double kP,
                                          double kQ, double phi_z);

Vec2 power_to_current(double P0, double Q0, Vec2 vc, Phases phases = Phases::Three);
// Inverse map: instantaneous (P, Q) from dq voltage and current.
std::pair<double, double> dq_power(Vec2 v, Vec2 i, Phases phases = Phases::Three);

}  // namespace modeshift::plant
