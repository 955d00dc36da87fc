#include "modeshift/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modeshift/error.hpp"
#include "modeshift/tfcore/margins.hpp"

namespace modeshift::synth {

using tf::cplx;
using tf::Polynomial;

namespace {

// "x << y" is read as x <= y / 5.
constexpr double kSeparation = 5.0;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

RationalTF first_order(double k, double zero, double pole) {
  return {k * Polynomial::s_plus(zero), Polynomial::s_plus(pole)};
}

// (s + a w)/(a s + w)
RationalTF lead(double a, double w) { return {Polynomial{a * w, 1.0}, Polynomial{w, a}}; }

}  // namespace

void SynthParams::validate() const {
  const double freqs[] = {wm, wd, wq, w1, w2, wf, alpha_v, alpha_theta, v0, omega_J};
  for (double f : freqs)
    if (!(f > 0.0) || !std::isfinite(f))
      throw Error(ErrorCode::InvalidParams, "controller frequencies and alphas must be positive");
  if (wtheta < 0.0) throw Error(ErrorCode::InvalidParams, "omega_theta must be >= 0 (0 = derive)");
  if (!(a_d > 0.0 && a_d <= 1.0) || !(a_q > 0.0 && a_q <= 1.0))
    throw Error(ErrorCode::InvalidParams, "lead ratios a_d, a_q must lie in (0, 1]");
  if (beta_v < 0.0 || beta_theta < 0.0 || k_w0 < 0.0 || k_h2 < 0.0 || dw_max <= 0.0)
    throw Error(ErrorCode::InvalidParams, "betas and PR gains must be >= 0, dw_max > 0");
  line.validate();
}

std::vector<std::string> SynthParams::check() const {
  std::vector<std::string> w;
  const double Z = line.Z();
  if (!(w1 < w2)) w.push_back("w1 < w2 violated");
  if (w2 * kSeparation > wq) w.push_back("w2 << wq violated (w2=" + fmt(w2) + ", wq=" + fmt(wq) + ")");
  const double dv = std::max(alpha_v, 4.0 * a_d * Z / M_SQRT2 * beta_v);
  if (dv * kSeparation > wd) w.push_back("max{alpha_v, 4aZ/sqrt2 beta_v} << wd violated (" + fmt(dv) + ")");
  if (wtheta > 0.0) {
    const double dq = std::max(alpha_theta / wtheta, beta_theta * Z);
    if (dq * kSeparation > omega_J)
      w.push_back("max{alpha_theta/w_theta, beta_theta Z} << wJ violated (" + fmt(dq) + ")");
  }
  if (!(omega_J < wf)) w.push_back("wJ < wf violated");
  if (omega_J < w1 || omega_J > w2) w.push_back("wJ outside passband [w1, w2]");
  return w;
}

ModePoint preset(const std::string& name) {
  if (name == "GFM") return {2.0, 0.02};
  if (name == "GFL") return {0.0, 0.0};
  if (name == "STATCOM") return {0.0, 0.02};
  if (name == "ESS") return {2.0, 0.0};
  if (name == "VSI") return {10.0, 0.5};
  throw Error(ErrorCode::InvalidParams, "unknown mode preset '" + name + "'");
}

TransferMatrix2 make_KL(const plant::LineParams& line, double wm, Shaper kind) {
  line.validate();
  const double Z = line.Z(), c = std::cos(line.phi_z()), s = std::sin(line.phi_z());
  const Polynomial den = Polynomial::s_plus(wm);
  auto e = [&](double c0, double c1) { return RationalTF(wm * Polynomial{c0, c1}, den); };
  const RationalTF d = e(c, line.L / Z);
  if (kind == Shaper::Diagonal) return {d, e(-s, 0.0), e(s, 0.0), d};
  const double lam = line.lambda(), w0 = line.omega0, n = lam * lam + w0 * w0;
  return {d, e(-s, 0.0), e(1.0, lam / n), e(0.0, w0 / n)};
}

TransferMatrix2 make_KL_static(double phi1, double phi2) {
  using K = RationalTF;
  return {K::constant(std::cos(phi1)), K::constant(-std::sin(phi1)), K::constant(std::sin(phi2)),
          K::constant(std::cos(phi2))};
}

RationalTF make_PR(double k, double dw_max, double w0, int harmonic) {
  if (k < 0.0) throw Error(ErrorCode::InvalidParams, "PR gain must be >= 0");
  if (harmonic < 1) throw Error(ErrorCode::InvalidParams, "PR harmonic must be >= 1");
  if (k == 0.0) return RationalTF::constant(1.0);
  const double wh = harmonic * w0;
  const double zeta = dw_max / wh;
  const Polynomial den{wh * wh, 2.0 * zeta * wh, 1.0};
  return {den + Polynomial{0.0, k * 2.0 * zeta * wh}, den};
}

RationalTF Sections::product() const {
  RationalTF p = RationalTF::constant(1.0);
  for (const auto& s : parts) p = p * s;
  return p;
}

Sections kd_core_sections(const SynthParams& p) {
  const double Z = p.line.Z();
  const double g = 2.0 * M_SQRT2 * std::pow(p.wd, 3) / (p.wm / Z);
  const double pv = kd_lag_pole(p);
  return {{first_order(g, p.wm, pv), RationalTF(Polynomial::s_plus(p.alpha_v), Polynomial::s_plus(p.wd)),
           RationalTF(Polynomial::constant(1.0), Polynomial::s_plus(p.wd) * Polynomial::s_plus(p.wd)),
           lead(p.a_d, p.wd)}};
}

Sections k1q_core_sections(const SynthParams& p) {
  const double Z = p.line.Z();
  const double g = 2.0 * p.wq * p.wq * std::hypot(p.wq, p.w2) / (p.wm / Z);
  return {{first_order(g, p.wm, p.w1), RationalTF(Polynomial{0.0, 1.0}, Polynomial::s_plus(p.w2)),
           RationalTF(Polynomial::constant(1.0), Polynomial::s_plus(p.wq) * Polynomial::s_plus(p.wq)),
           lead(p.a_q, p.wq)}};
}

Sections pr_sections(const SynthParams& p) {
  Sections s;
  if (p.k_w0 > 0.0) s.parts.push_back(make_PR(p.k_w0, p.dw_max, p.line.omega0, 1));
  if (p.k_h2 > 0.0) s.parts.push_back(make_PR(p.k_h2, p.dw_max, p.line.omega0, 2));
  return s;
}

Sections k2q_sections(const SynthParams& p) {
  const double Z = p.line.Z();
  if (!(p.wtheta > 0.0)) throw Error(ErrorCode::InvalidParams, "omega_theta unresolved");
  return {{RationalTF(Polynomial{p.wm, 1.0} * (p.wf * Z / p.wm), Polynomial::s_plus(p.wf)),
           k2q_lag_section(p), RationalTF::integrator(p.wtheta)}};
}

double kd_lag_pole(const SynthParams& p) { return 2.0 * M_SQRT2 * p.a_d * p.line.Z() * p.beta_v; }

RationalTF k2q_lag_section(const SynthParams& p) {
  return {Polynomial::s_plus(p.alpha_theta / p.wtheta), Polynomial::s_plus(p.beta_theta * p.line.Z())};
}

namespace {

ControllerSet build(const SynthParams& p) {
  ControllerSet cs;
  cs.params = p;
  cs.KL = make_KL(p.line, p.wm, p.shaper);
  const Sections pr = pr_sections(p);
  const RationalTF prod_pr = pr.product();
  if (!pr.parts.empty()) {
    cs.K_PR_d = prod_pr;
    cs.K_PR_q = prod_pr;
  }
  cs.Kd = kd_core_sections(p).product() * prod_pr;
  cs.K1q = k1q_core_sections(p).product() * prod_pr;
  cs.K2q = k2q_sections(p).product();
  // Literal factors: the d-axis lag pole sits at the origin iff beta_v == 0;
  // K2q always carries 1/s and a second one iff beta_theta == 0.
  cs.structural_integrators = {p.beta_v == 0.0 ? 1 : 0, 1 + (p.beta_theta == 0.0 ? 1 : 0)};
  cs.warnings = p.check();
  return cs;
}

}  // namespace

TransferMatrix2 modified_plant(const SynthParams& p, const plant::LineParams& actual) {
  return (make_KL(p.line, p.wm, p.shaper) * plant::line_tf(actual)).diagonal();
}

RationalTF theta_tf(const RationalTF& G, const RationalTF& K1q, const RationalTF& K2q) {
  // G K2 / (1 + G K1 + G K2) assembled over one common denominator.
  const Polynomial &gn = G.num(), &gd = G.den();
  const Polynomial &an = K1q.num(), &ad = K1q.den(), &bn = K2q.num(), &bd = K2q.den();
  const Polynomial num = gn * bn * ad;
  const Polynomial den = gd * ad * bd + gn * an * bd + gn * bn * ad;
  return {num, den};
}

double minus3db_bandwidth(const RationalTF& T, double w_lo, double w_hi) {
  const double thr = 1.0 / std::sqrt(2.0);
  const auto grid = tf::log_grid(w_lo, w_hi, 100);
  auto f = [&](double w) { return std::abs(T.at(w)) - thr; };
  double prev_w = grid.front(), prev_f = f(prev_w);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double fw = f(grid[i]);
    if (prev_f >= 0.0 && fw < 0.0) {
      double lo = std::log(prev_w), hi = std::log(grid[i]);
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(std::exp(m)) >= 0.0 ? lo : hi) = m;
      }
      return std::exp(0.5 * (lo + hi));
    }
    prev_w = grid[i];
    prev_f = fw;
  }
  return w_hi;
}

namespace {

double bandwidth_for(const SynthParams& p, const RationalTF& G, const RationalTF& K1q, double wtheta) {
  SynthParams q = p;
  q.wtheta = wtheta;
  const RationalTF T = theta_tf(G, K1q, k2q_sections(q).product());
  return minus3db_bandwidth(T, p.omega_J * 1e-3, p.wq * 10.0);
}

}  // namespace

double inertia_to_omega_theta(double wJ, const SynthParams& p, std::vector<std::string>* warnings) {
  if (!(wJ > 0.0)) throw Error(ErrorCode::InvalidParams, "wJ must be positive");
  if (warnings && (wJ < p.w1 || wJ > p.w2)) warnings->push_back("wJ outside passband [w1, w2]");
  SynthParams q = p;
  q.omega_J = wJ;
  const RationalTF G = modified_plant(q, q.line)(1, 1);
  const RationalTF K1q = k1q_core_sections(q).product() * pr_sections(q).product();
  // Passband intersection of |K2q G| ~ wt/w with |K1q G| at wJ.
  const double w0 = wJ * std::abs(K1q.at(wJ) * G.at(wJ));
  double lo = std::log(w0 / 16.0), hi = std::log(w0 * 16.0);
  const double target = std::log(wJ);
  if (std::log(bandwidth_for(q, G, K1q, std::exp(lo))) > target ||
      std::log(bandwidth_for(q, G, K1q, std::exp(hi))) < target) {
    if (warnings) warnings->push_back("T_theta bandwidth target not bracketed; using intersection value");
    return w0;
  }
  for (int it = 0; it < 50; ++it) {
    const double m = 0.5 * (lo + hi);
    (std::log(bandwidth_for(q, G, K1q, std::exp(m))) < target ? lo : hi) = m;
  }
  return std::exp(0.5 * (lo + hi));
}

SynthParams design_for_inertia(SynthParams p, double wJ) {
  p.omega_J = wJ;
  p.wf = 5.0 * wJ;
  p.wtheta = inertia_to_omega_theta(wJ, p);
  return p;
}

ControllerSet make_controllers(const SynthParams& p_in) {
  p_in.validate();
  SynthParams p = p_in;
  std::vector<std::string> extra;
  if (!(p.wtheta > 0.0)) p.wtheta = inertia_to_omega_theta(p.omega_J, p, &extra);
  ControllerSet cs = build(p);
  cs.warnings.insert(cs.warnings.end(), extra.begin(), extra.end());
  return cs;
}

SynthParams apply_mode_point(const SynthParams& p, ModePoint k) {
  if (k.kv < 0.0 || k.ktheta < 0.0) throw Error(ErrorCode::InvalidParams, "kappa components must be >= 0");
  SynthParams out = p;
  out.beta_v = k.kv * p.alpha_v;
  out.beta_theta = k.ktheta * p.alpha_theta;
  return out;
}

}  // namespace modeshift::synth
