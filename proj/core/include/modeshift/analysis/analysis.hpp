#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modeshift/synth/synth.hpp"
#include "modeshift/tfcore/margins.hpp"

namespace modeshift::analysis {

using synth::ControllerSet;
using tf::Mat2c;
using tf::RationalTF;
using tf::TransferMatrix2;

// ---- factorization -------------------------------------------------------

struct FactorizationResult {
  std::vector<double> omega;
  // Pointwise samples. The closed-form MIMO S has a determinant of very high
  // degree, so only the diagonal factors are kept symbolically.
  std::vector<Mat2c> S, S_tilde_w, Gamma_w, Xc;
  TransferMatrix2 S_tilde;  // diag(1/(1+K^d G~M^d), 1/(1+K^q G~M^q))
  TransferMatrix2 Gamma;    // G_M^-1 G~M
  std::vector<double> epsilon;
  double max_residual = 0.0;   // max ||S - Gamma Xc S~||
  double max_st_residual = 0.0;  // max ||S + T - I||
};

FactorizationResult factorize(const TransferMatrix2& KL, const TransferMatrix2& K_tilde,
                              const TransferMatrix2& GL, const std::vector<double>& grid);

struct CouplingSample {
  double omega, epsilon, bound, direct;
  bool valid;  // epsilon < 1
};
std::vector<CouplingSample> coupling_bound(const FactorizationResult& fr);

// ---- stability -----------------------------------------------------------

struct Design {
  ControllerSet cs;
  plant::LineParams line;  // the physical line (may differ from cs.params.line)
};

struct StabilityReport {
  bool siso_ok_d = false, siso_ok_q = false;
  double max_pole_re_d = 0.0, max_pole_re_q = 0.0;  // rad/s
  bool decoupling_ok = false;
  bool magnitude_ok = false;
  double eps_inf = 0.0;
  bool nonlinear_ok = false;
  double nonlinear_margin = 0.0;  // min over omega of rhs/lhs of the bound
  double nonlinear_worst_omega = 0.0;
  tf::MarginReport margins_d, margins_q;

  bool siso_ok() const { return siso_ok_d && siso_ok_q; }
  bool overall() const { return siso_ok() && (decoupling_ok || magnitude_ok); }
};

struct StabilityOptions {
  std::vector<double> grid = tf::default_grid();
  double pole_tol = 1e-6;  // Re < -pole_tol * polynomial root scale
};

// Open loops L_d = K^d G~M^d, L_q = K^q G~M^q for the physical line.
std::pair<RationalTF, RationalTF> open_loops(const Design& d);

// Stability of 1 + L via the roots of den + num.
bool closed_loop_stable(const RationalTF& L, double tol, double* max_re = nullptr);

StabilityReport check_stability(const Design& d, double dw_max,
                                const StabilityOptions& opt = StabilityOptions{});

struct ShaperConditioning {
  double det_Xc_inf_formula = 0.0, det_Xc_inf_numeric = 0.0;
  double kappa_formula = 0.0, kappa_numeric = 0.0;
};
ShaperConditioning shaper_conditioning(double phi1, double phi2, const plant::LineParams& line);

// ---- modes ---------------------------------------------------------------

enum class Mode { GFM, GFL, STATCOM, ESS, Intermediate };
const char* to_string(Mode m);

struct ModeReport {
  Mode mode = Mode::GFM;
  Mode vertex = Mode::GFM;  // vertex label from the integrator counts
  synth::ModePoint kappa;
  synth::IntegratorCounts integrators;
  double droop_d = 0.0;       // ohm, +inf with a d-axis integrator
  double droop_q_raw = 0.0;   // lim s K^q, V/(rad), +inf with two q integrators
  double droop_q = 0.0;       // (rad/s)/A = droop_q_raw / v0
  // Distances from the κ point to the GFL origin and the two axes.
  double dist_gfl = 0.0, dist_kv_axis = 0.0, dist_ktheta_axis = 0.0;
  bool sync_ok = false;
  double theta_bandwidth = 0.0;  // rad/s
  double theta_peak_db = 0.0;
};

struct ModeOptions {
  // Nonzero κ components below this count as "small" (intermediate point).
  double intermediate_kappa = 1e-3;
};

ModeReport classify_mode(const ControllerSet& cs, const ModeOptions& opt = ModeOptions{});

// Steady-state e' under constant grid deviations (dv volts, dw rad/s).
struct SteadyError {
  double e_d, e_q;  // A
};
SteadyError steady_state_error(const ModeReport& m, double dv, double dw, double v0);

struct SharingTable {
  // ratio_d[i][j] = e'^d_i / e'^d_j predicted; same for q.
  std::vector<std::vector<double>> ratio_d, ratio_q;
  std::vector<double> weight_d, weight_q;  // normalized shares
};
SharingTable sharing_ratios(const std::vector<Design>& designs);

struct FreqShape {
  RationalTF T_theta, T_v;
  double bandwidth = 0.0;  // rad/s
  double M_T_db = 0.0;
  double identity_residual = 0.0;  // max |T_theta + T_v + S~q - 1| on the check grid
};
FreqShape freq_shape(const ControllerSet& cs, const RationalTF& GMq);

struct SyncDiagnostics {
  bool ok = false;
  int ratio_origin_zeros = 0;  // of K1q/K2q, counted on the unsimplified ratio
  int k2q_origin_poles = 0;
};
SyncDiagnostics sync_check(const RationalTF& K1q, const RationalTF& K2q);
inline SyncDiagnostics sync_check(const ControllerSet& cs) { return sync_check(cs.K1q, cs.K2q); }

}  // namespace modeshift::analysis
