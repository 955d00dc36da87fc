#include "modeshift/sim/inverter.hpp"

#include <algorithm>
#include <cmath>

#include "modeshift/error.hpp"

namespace modeshift::sim {

namespace {

Vec2 rotate(Vec2 x, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * x[0] - s * x[1], s * x[0] + c * x[1]};
}

// J x with J = [[0, -1], [1, 0]].
Vec2 jmul(Vec2 x) { return {-x[1], x[0]}; }

double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  return a < 0.0 ? a + 2.0 * M_PI : a;
}

std::vector<std::optional<double>> pr_prewarp(const synth::SynthParams& p, size_t leading) {
  std::vector<std::optional<double>> w(leading, std::nullopt);
  if (p.k_w0 > 0.0) w.push_back(p.line.omega0);
  if (p.k_h2 > 0.0) w.push_back(2.0 * p.line.omega0);
  return w;
}

}  // namespace

InverterUnit::InverterUnit(const InverterConfig& cfg, double control_Ts)
    : cfg_(cfg), Ts_(control_Ts), setpoint_(cfg.setpoint), kappa_(cfg.kappa0) {
  cfg_.inv.validate(control_Ts);
  cfg_.line.validate();
  const synth::ControllerSet cs = synth::make_controllers(design_params(cfg_));
  p_ = cs.params;
  cas_ = synth::split_cascade(cs, cfg_.inv);

  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (!cs.KL(r, c).is_zero()) KL_[2 * r + c].emplace(cs.KL(r, c), Ts_);
  Kc_d_ = BlockChain(cas_.Kc_d_sections.parts, Ts_, pr_prewarp(p_, 2));
  Kc_q_ = BlockChain(cas_.Kc_q_sections.parts, Ts_, pr_prewarp(p_, 2));
  K2q_ = BlockChain(synth::k2q_sections(p_).parts, Ts_);
  Kv_d_ = DiscreteBlock(cas_.Kv_d, Ts_);
  Kv_q_ = DiscreteBlock(cas_.Kv_q, Ts_);
  Ki_d_ = DiscreteBlock(cas_.Ki_d, Ts_);
  Ki_q_ = DiscreteBlock(cas_.Ki_q, Ts_);
  if (cfg_.inv.ig_ff_inverse) {
    // 1/T_i = 1 + s/wc, with the derivative rolled off at wf.
    auto deriv = [&](double wc) {
      const double wf = std::min(10.0 * wc, 1.0 / Ts_);
      return DiscreteBlock(tf::RationalTF(tf::Polynomial{0.0, wf / wc}, tf::Polynomial::s_plus(wf)), Ts_);
    };
    ff_d_ = deriv(cas_.wc_d);
    ff_q_ = deriv(cas_.wc_q);
  }

  schedule_ = cfg_.mode_schedule;
  std::stable_sort(schedule_.begin(), schedule_.end(),
                   [](const ModeStep& a, const ModeStep& b) { return a.t_start < b.t_start; });
  out_.kappa = kappa_;
  out_.theta_dot = p_.line.omega0;
  out_.vc = {p_.v0, 0.0};
}

PhysicalState InverterUnit::nominal_state() const {
  PhysicalState s;
  s.vc = {cfg_.inv.v0, 0.0};
  // Capacitor current balancing the rotating-frame term.
  const Vec2 jv = jmul(s.vc);
  const double w0 = cfg_.line.omega0;
  s.iL = {cfg_.inv.Ci * w0 * jv[0], cfg_.inv.Ci * w0 * jv[1]};
  return s;
}

void InverterUnit::schedule_mode(double t, ModePoint target, double ramp) {
  const ModePoint now = kappa_at(t);
  // Truncate the schedule at t so the new ramp starts from the current value.
  std::vector<ModeStep> kept;
  for (const auto& s : schedule_)
    if (s.t_start + s.ramp <= t) kept.push_back(s);
  kept.push_back({t, now, 0.0});
  kept.push_back({t, target, ramp});
  schedule_ = std::move(kept);
}

ModePoint InverterUnit::kappa_at(double t) const {
  ModePoint k = cfg_.kappa0;
  for (const auto& s : schedule_) {
    if (t < s.t_start) break;
    if (s.ramp <= 0.0 || t >= s.t_start + s.ramp) {
      k = s.target;
    } else {
      const double f = (t - s.t_start) / s.ramp;
      k = {k.kv + f * (s.target.kv - k.kv), k.ktheta + f * (s.target.ktheta - k.ktheta)};
      break;
    }
  }
  return k;
}

void InverterUnit::apply_kappa(ModePoint k) {
  if (k == kappa_) return;
  kappa_ = k;
  synth::SynthParams q = synth::apply_mode_point(p_, k);
  p_.beta_v = q.beta_v;
  p_.beta_theta = q.beta_theta;
  const tf::RationalTF& first = cas_.Kc_d_sections.parts[0];
  const double g = first.num().leading();  // gd (s + wm)
  Kc_d_[0].retune({g * tf::Polynomial::s_plus(p_.wm), tf::Polynomial::s_plus(synth::kd_lag_pole(p_))});
  K2q_[1].retune(synth::k2q_lag_section(p_));
}

const ControlOutput& InverterUnit::control(double t, const PhysicalState& meas) {
  apply_kappa(kappa_at(t));
  const double v0 = p_.v0, w0 = p_.line.omega0;

  // Frame offset from the previous update.
  const double phi = out_.u_theta / v0;
  const Vec2 ig = rotate(meas.ig, -phi), vc = rotate(meas.vc, -phi), iL = rotate(meas.iL, -phi);

  const Vec2 i0 = setpoint_.current(v0);
  const Vec2 e{i0[0] - ig[0], i0[1] - ig[1]};
  Vec2 ep{0.0, 0.0};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (KL_[2 * r + c]) ep[r] += KL_[2 * r + c]->step(e[c]);

  const double ir_d = Kc_d_.step(ep[0]);
  const double ir_q = Kc_q_.step(ep[1]);

  // Angle path: the lag output sets the frequency, the integrator the angle.
  const double y1 = K2q_[0].step(ep[1]);
  y2_ = K2q_[1].step(y1);
  double u_theta = K2q_[2].step(y2_);
  const double theta_dot = w0 + p_.wtheta * y2_ / v0;
  if (std::abs(u_theta / v0) > M_PI) {
    // Drop whole turns from the angle integrator; the frame is unchanged.
    const double shift = std::round(u_theta / (2.0 * M_PI * v0)) * 2.0 * M_PI * v0;
    K2q_[2].shift_output(-shift);
    u_theta -= shift;
  }
  const double phi_new = u_theta / v0;

  // Voltage loop with decoupling feedforward.
  const Vec2 ev{v0 - vc[0], -vc[1]};
  const Vec2 jvc = jmul(vc), jiL = jmul(iL);
  const double Ci = cfg_.inv.Ci, Li = cfg_.inv.Li, vdc = cfg_.inv.vdc;
  Vec2 ff{ig[0] + Ci * theta_dot * jvc[0], ig[1] + Ci * theta_dot * jvc[1]};
  if (ff_d_) ff = {ff[0] + ff_d_->step(ff[0]), ff[1] + ff_q_->step(ff[1])};
  const Vec2 iL_ref{ir_d + Kv_d_.step(ev[0]) + ff[0], ir_q + Kv_q_.step(ev[1]) + ff[1]};

  // Current loop with anti-windup by conditional integration.
  const Vec2 ei{iL_ref[0] - iL[0], iL_ref[1] - iL[1]};
  const Vec2 ui{Ki_d_.peek(ei[0]), Ki_q_.peek(ei[1])};
  Vec2 m{2.0 / vdc * (ui[0] + vc[0] + Li * theta_dot * jiL[0]),
         2.0 / vdc * (ui[1] + vc[1] + Li * theta_dot * jiL[1])};
  const bool sat = std::abs(m[0]) > 1.0 || std::abs(m[1]) > 1.0;
  if (sat) {
    Ki_d_.commit_hold(ei[0]);
    Ki_q_.commit_hold(ei[1]);
    m = {std::clamp(m[0], -1.0, 1.0), std::clamp(m[1], -1.0, 1.0)};
  } else {
    Ki_d_.step(ei[0]);
    Ki_q_.step(ei[1]);
  }

  out_.m_global = rotate(m, phi_new);
  out_.ig = ig;
  out_.vc = vc;
  out_.iL = iL;
  out_.e_prime = ep;
  out_.u_theta = u_theta;
  out_.theta = wrap_2pi(w0 * t + phi_new);
  out_.theta_dot = theta_dot;
  const auto [P, Q] = plant::dq_power(vc, ig);
  out_.P = P;
  out_.Q = Q;
  out_.kappa = kappa_;
  out_.saturated = sat;
  return out_;
}

bool InverterUnit::finite() const {
  for (const auto& b : KL_)
    if (b && !b->finite()) return false;
  return Kc_d_.finite() && Kc_q_.finite() && K2q_.finite() && Kv_d_.finite() && Kv_q_.finite() &&
         Ki_d_.finite() && Ki_q_.finite() && (!ff_d_ || (ff_d_->finite() && ff_q_->finite())) &&
         std::isfinite(out_.u_theta);
}

}  // namespace modeshift::sim
