#include "modeshift/synth/cascade.hpp"

#include <cmath>

#include "modeshift/error.hpp"

namespace modeshift::synth {

using tf::Polynomial;

RationalTF voltage_compensator(const Polynomial& N_in, const Polynomial& D_in, double Ci, double* wc_out) {
  const Polynomial N = N_in.monic(), D = D_in.monic();
  const int n = N.degree(), m = D.degree();
  // m - n > 2 would leave an improper K_v.
  if (m - n != 2) throw Error(ErrorCode::SplitNotApplicable, "K_inv relative degree must be exactly 2");
  const double wc = D.coeff(m - 1) - (n >= 1 ? N.coeff(n - 1) : 0.0);
  if (!(wc > 0.0)) throw Error(ErrorCode::SplitNotApplicable, "non-positive inner bandwidth");
  const Polynomial Nv = D - Polynomial{0.0, wc, 1.0} * N;
  // The two leading terms cancel by construction of wc; drop the round-off.
  std::vector<double> c(Nv.coeffs().begin(), Nv.coeffs().end());
  c.resize(static_cast<size_t>(n + 1), 0.0);
  if (wc_out) *wc_out = wc;
  return {Ci * Polynomial(c), wc * N};
}

namespace {

RationalTF pi_current(double wc, const plant::InverterParams& inv) {
  return {wc * Polynomial{inv.Ri, inv.Li}, Polynomial{0.0, 1.0}};
}

}  // namespace

CascadeRealization split_cascade(const ControllerSet& cs, const plant::InverterParams& inv) {
  if (!cs.nominal_template)
    throw Error(ErrorCode::SplitNotApplicable, "controller shape differs from the synthesized template");
  const SynthParams& p = cs.params;
  const double Z = p.line.Z(), Ci = inv.Ci;
  CascadeRealization r;

  // d axis: smallest zero (alpha_v) and the triple pole at wd.
  const Polynomial wd3 = Polynomial::s_plus(p.wd) * Polynomial::s_plus(p.wd) * Polynomial::s_plus(p.wd);
  const Polynomial Nd = Polynomial::s_plus(p.alpha_v);
  r.Kv_d = voltage_compensator(Nd, wd3, Ci, &r.wc_d);
  r.Kinv_d = {(r.wc_d / Ci) * Nd, wd3};
  const double gd = Ci / r.wc_d * 2.0 * M_SQRT2 * std::pow(p.wd, 3) / (p.wm / Z);
  const double pv = kd_lag_pole(p);
  r.Kc_d_sections.parts = {RationalTF(gd * Polynomial::s_plus(p.wm), Polynomial::s_plus(pv)),
                           RationalTF(Polynomial{p.a_d * p.wd, 1.0}, Polynomial{p.wd, p.a_d})};

  // q axis: the origin zero and poles {w2, wq, wq}.
  const Polynomial Dq = Polynomial::s_plus(p.w2) * Polynomial::s_plus(p.wq) * Polynomial::s_plus(p.wq);
  const Polynomial Nq{0.0, 1.0};
  r.Kv_q = voltage_compensator(Nq, Dq, Ci, &r.wc_q);
  r.Kinv_q = {(r.wc_q / Ci) * Nq, Dq};
  const double gq = Ci / r.wc_q * 2.0 * p.wq * p.wq * std::hypot(p.wq, p.w2) / (p.wm / Z);
  r.Kc_q_sections.parts = {RationalTF(gq * Polynomial::s_plus(p.wm), Polynomial::s_plus(p.w1)),
                           RationalTF(Polynomial{p.a_q * p.wq, 1.0}, Polynomial{p.wq, p.a_q})};

  for (const auto& pr : pr_sections(p).parts) {
    r.Kc_d_sections.parts.push_back(pr);
    r.Kc_q_sections.parts.push_back(pr);
  }
  r.Kc_d = r.Kc_d_sections.product();
  r.Kc_q = r.Kc_q_sections.product();
  r.Ki_d = pi_current(r.wc_d, inv);
  r.Ki_q = pi_current(r.wc_q, inv);
  return r;
}

}  // namespace modeshift::synth
