#include "modeshift/plant/plant.hpp"

#include <string>

#include "modeshift/error.hpp"

namespace modeshift::plant {

using tf::Polynomial;
using tf::RationalTF;

void LineParams::validate() const {
  if (!(R >= 0.0) || !(L > 0.0) || !(omega0 > 0.0))
    throw Error(ErrorCode::InvalidParams, "line requires R >= 0, L > 0, omega0 > 0");
}

void InverterParams::validate(double control_Ts) const {
  if (!(Li > 0 && Ri >= 0 && Ci > 0 && vdc > 0 && v0 > 0 && omega_c > 0 && rating > 0))
    throw Error(ErrorCode::InvalidParams, "inverter parameters must be positive");
  if (control_Ts > 0.0 && omega_c >= M_PI / control_Ts)
    throw Error(ErrorCode::InvalidParams,
                "inner-loop bandwidth " + std::to_string(omega_c) + " rad/s is above Nyquist");
}

tf::TransferMatrix2 line_tf(const LineParams& p) {
  p.validate();
  const double lam = p.lambda(), w0 = p.omega0;
  const Polynomial den = p.L * Polynomial{lam * lam + w0 * w0, 2.0 * lam, 1.0};
  const RationalTF diag(Polynomial{lam, 1.0}, den);
  return {diag, RationalTF(Polynomial::constant(w0), den), RationalTF(Polynomial::constant(-w0), den), diag};
}

std::pair<double, double> steady_power_flow(double vc_mag, double vg_mag, double delta,
                                            const LineParams& line) {
  const double Z = line.Z(), phi = line.phi_z();
  const double k = vc_mag * vg_mag / Z;
  const double P = k * (std::cos(delta) * std::cos(phi) - std::sin(delta) * std::sin(phi)) -
                   vg_mag * vg_mag / Z * std::cos(phi);
  const double Q = k * (std::sin(delta) * std::cos(phi) + std::cos(delta) * std::sin(phi)) -
                   vg_mag * vg_mag / Z * std::sin(phi);
  return {P, Q};
}

std::pair<double, double> universal_droop(double P, double Q, double P0, double Q0, double kP,
                                          double kQ, double phi_z) {
  const double dP = P0 - P, dQ = Q0 - Q;
  const double c = std::cos(phi_z), s = std::sin(phi_z);
  return {kP * (c * dP + s * dQ), -kQ * (-s * dP + c * dQ)};
}

namespace {
double phi_factor(Phases p) { return p == Phases::Three ? 2.0 / 3.0 : 1.0; }
}  // namespace

Vec2 power_to_current(double P0, double Q0, Vec2 vc, Phases phases) {
  const double n2 = vc[0] * vc[0] + vc[1] * vc[1];
  if (!(n2 > 0.0)) throw Error(ErrorCode::ZeroVoltage, "power-to-current mapping at zero voltage");
  const double k = phi_factor(phases) / n2;
  return {k * (vc[0] * P0 + vc[1] * Q0), k * (vc[1] * P0 - vc[0] * Q0)};
}

std::pair<double, double> dq_power(Vec2 v, Vec2 i, Phases phases) {
  const double k = 1.0 / phi_factor(phases);
  return {k * (v[0] * i[0] + v[1] * i[1]), k * (v[1] * i[0] - v[0] * i[1])};
}

}  // namespace modeshift::plant
