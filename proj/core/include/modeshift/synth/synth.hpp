#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modeshift/plant/plant.hpp"
#include "modeshift/tfcore/transfer_matrix.hpp"

namespace modeshift::synth {

using tf::RationalTF;
using tf::TransferMatrix2;

enum class Shaper { Diagonal, Triangular };

struct ModePoint {
  double kv = 0.0;
  double ktheta = 0.0;
  bool operator==(const ModePoint&) const = default;
};

// Parameters of the outer-loop controllers. The lead ratio is per axis
// (a_d, a_q); a single shared value cannot hit the phase-margin target on
// both axes.
struct SynthParams {
  double wm = 2 * M_PI * 1000.0;
  double wd = 2 * M_PI * 300.0;
  double wq = 2 * M_PI * 300.0;
  double w1 = 2 * M_PI * 5.0 / 3.0;
  double w2 = 2 * M_PI * 15.0;
  double wtheta = 0.0;  // 0: derive from omega_J at synthesis
  double wf = 2 * M_PI * 25.0;
  double a_d = 0.767;
  double a_q = 0.25;
  double alpha_v = 10.0;
  double beta_v = 20.0;
  double alpha_theta = 500.0;
  double beta_theta = 10.0;
  double k_w0 = 5.0;     // fundamental PR gain, 0 disables
  double k_h2 = 0.0;     // second-harmonic PR gain, 0 disables
  double dw_max = 2 * M_PI * 0.5;
  double omega_J = 2 * M_PI * 5.0;  // inertial bandwidth target
  double v0 = 120.0 * M_SQRT2 / std::sqrt(3.0);
  plant::LineParams line{};
  Shaper shaper = Shaper::Diagonal;

  ModePoint kappa() const { return {beta_v / alpha_v, beta_theta / alpha_theta}; }
  // Violated separation inequalities, as human-readable strings.
  std::vector<std::string> check() const;
  // Throws InvalidParams on nonpositive frequencies or out-of-range a.
  void validate() const;
  bool operator==(const SynthParams&) const = default;
};

ModePoint preset(const std::string& name);  // GFM, GFL, STATCOM, ESS, VSI

struct IntegratorCounts {
  int d = 0;
  int q = 0;
  bool operator==(const IntegratorCounts&) const = default;
};

struct ControllerSet {
  TransferMatrix2 KL;
  RationalTF Kd;   // includes PR factors
  RationalTF K1q;  // includes PR factors
  RationalTF K2q;
  std::optional<RationalTF> K_PR_d, K_PR_q;
  IntegratorCounts structural_integrators;
  SynthParams params;
  bool nominal_template = true;  // false once a caller edits the controllers
  std::vector<std::string> warnings;

  RationalTF Kq() const { return K1q + K2q; }
  TransferMatrix2 K_tilde() const { return TransferMatrix2::diag(Kd, Kq()); }
};

TransferMatrix2 make_KL(const plant::LineParams& line, double wm, Shaper kind);
// Static K_L whose rows are rotations by phi1 and phi2.
TransferMatrix2 make_KL_static(double phi1, double phi2);

RationalTF make_PR(double k, double dw_max, double w0, int harmonic = 1);

ControllerSet make_controllers(const SynthParams& p);

SynthParams apply_mode_point(const SynthParams& p, ModePoint k);

// Diagonal of K_L G_L for the design line; the modified plant seen by the
// 2-SISO design.
TransferMatrix2 modified_plant(const SynthParams& p, const plant::LineParams& actual);

// T_theta = G K2 / (1 + G (K1 + K2)) on the q axis.
RationalTF theta_tf(const RationalTF& G, const RationalTF& K1q, const RationalTF& K2q);
// First frequency where |T| drops below 1/sqrt(2), searched on a log grid in
// [w_lo, w_hi] and refined by bisection. Returns w_hi when none.
double minus3db_bandwidth(const RationalTF& T, double w_lo, double w_hi);

// omega_theta giving a T_theta -3 dB bandwidth of wJ. Starts from the
// passband intersection |K2q G| = |K1q G| at wJ and refines by bisection.
// Warnings (wJ outside [w1, w2]) are appended to *warnings when given.
double inertia_to_omega_theta(double wJ, const SynthParams& p,
                              std::vector<std::string>* warnings = nullptr);

// Sets omega_J, wf = 5 wJ and the matching omega_theta.
SynthParams design_for_inertia(SynthParams p, double wJ);

// Factored sections; their products equal the listed controllers.
struct Sections {
  std::vector<RationalTF> parts;
  RationalTF product() const;
};
Sections kd_core_sections(const SynthParams& p);   // K^d without PR
Sections k1q_core_sections(const SynthParams& p);  // K1^q without PR
Sections pr_sections(const SynthParams& p);        // fundamental + 2nd harmonic
// gain*(s+wm)wf/((wm/Z)(s+wf)), (s+at/wt)/(s+bt Z), wt/s
Sections k2q_sections(const SynthParams& p);

// The two kappa-dependent first-order factors; everything else in the
// controllers is fixed along a mode ramp.
double kd_lag_pole(const SynthParams& p);             // 0 when beta_v == 0
RationalTF k2q_lag_section(const SynthParams& p);     // (s + at/wt)/(s + bt Z)

}  // namespace modeshift::synth
