#pragma once

#include "modeshift/synth/synth.hpp"

namespace modeshift::synth {

struct CascadeRealization {
  RationalTF Kinv_d, Kinv_q;
  RationalTF Kc_d, Kc_q;
  RationalTF Kv_d, Kv_q;
  RationalTF Ki_d, Ki_q;
  double wc_d = 0.0, wc_q = 0.0;
  // Kc as series sections (gain-scheduled section first).
  Sections Kc_d_sections, Kc_q_sections;
};

// K_v = Ci (D - s (s + wc) N) / (wc N) for K_inv = (wc/Ci) N/D with monic
// N, D; wc = sum(poles) - sum(zeros). Throws SplitNotApplicable when the
// relative degree is below 2 or wc <= 0.
RationalTF voltage_compensator(const tf::Polynomial& N_monic, const tf::Polynomial& D_monic,
                               double Ci, double* wc_out);

CascadeRealization split_cascade(const ControllerSet& cs, const plant::InverterParams& inv);

}  // namespace modeshift::synth
