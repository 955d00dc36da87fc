#include <algorithm>
#include <cmath>
#include <numeric>

#include "modeshift/analysis/analysis.hpp"
#include <Eigen/Dense>

#include "modeshift/error.hpp"

namespace modeshift::analysis {

using tf::cplx;
using tf::Polynomial;

std::pair<RationalTF, RationalTF> open_loops(const Design& d) {
  const TransferMatrix2 GMt = synth::modified_plant(d.cs.params, d.line);
  return {d.cs.Kd * GMt(0, 0), d.cs.Kq() * GMt(1, 1)};
}

bool closed_loop_stable(const RationalTF& L, double tol, double* max_re) {
  const Polynomial cl = L.den() + L.num();
  const auto roots = cl.roots();
  double scale = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (const cplx& r : roots) {
    scale = std::max(scale, std::abs(r));
    worst = std::max(worst, r.real());
  }
  if (max_re) *max_re = worst;
  if (roots.empty()) return true;
  return worst < -tol * scale;
}

namespace {

std::vector<double> nonlinear_grid(const std::vector<double>& base, double w0, double lam, double dw) {
  std::vector<double> g = base;
  // The line resonance is only ~lambda wide; sample it densely.
  const double half = std::max(50.0 * lam, 4.0 * dw);
  for (int i = 0; i <= 4000; ++i) g.push_back(w0 - half + 2.0 * half * i / 4000.0);
  std::sort(g.begin(), g.end());
  g.erase(std::remove_if(g.begin(), g.end(), [](double w) { return !(w > 0.0); }), g.end());
  return g;
}

double refine_eps_max(const TransferMatrix2& KL, const TransferMatrix2& Kt, const TransferMatrix2& GL,
                      const FactorizationResult& fr) {
  std::vector<size_t> idx(fr.epsilon.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  const size_t top = std::min<size_t>(3, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(top), idx.end(),
                    [&](size_t a, size_t b) { return fr.epsilon[a] > fr.epsilon[b]; });
  double best = fr.epsilon.empty() ? 0.0 : fr.epsilon[idx[0]];
  for (size_t k = 0; k < top; ++k) {
    const size_t i = idx[k];
    const double lo = fr.omega[i > 0 ? i - 1 : i], hi = fr.omega[std::min(i + 1, fr.omega.size() - 1)];
    std::vector<double> local;
    for (int j = 0; j <= 40; ++j) local.push_back(lo * std::pow(hi / lo, j / 40.0));
    const auto f = factorize(KL, Kt, GL, local);
    for (double e : f.epsilon) best = std::max(best, e);
  }
  return best;
}

}  // namespace

StabilityReport check_stability(const Design& d, double dw_max, const StabilityOptions& opt) {
  StabilityReport rep;
  const auto [Ld, Lq] = open_loops(d);
  rep.siso_ok_d = closed_loop_stable(Ld, opt.pole_tol, &rep.max_pole_re_d);
  rep.siso_ok_q = closed_loop_stable(Lq, opt.pole_tol, &rep.max_pole_re_q);
  rep.margins_d = tf::margins(Ld, opt.grid);
  rep.margins_q = tf::margins(Lq, opt.grid);

  const TransferMatrix2 KL = d.cs.KL;
  const TransferMatrix2 Kt = d.cs.K_tilde();
  const TransferMatrix2 GL = plant::line_tf(d.line);

  const auto grid = nonlinear_grid(opt.grid, d.line.omega0, d.line.lambda(), dw_max);
  const FactorizationResult fr = factorize(KL, Kt, GL, grid);

  double worst_off = 0.0;
  for (double w : opt.grid) {
    const Mat2c gm = KL.at(w) * GL.at(w);
    const double n = tf::singular_values(gm).first;
    worst_off = std::max(worst_off, std::min(std::abs(gm(0, 1)), std::abs(gm(1, 0))) / n);
  }
  rep.decoupling_ok = worst_off < 1e-9;

  rep.eps_inf = refine_eps_max(KL, Kt, GL, fr);
  rep.magnitude_ok = rep.eps_inf < 1.0;

  // ||S~|| < 1 / (dw_max ||Gamma Xc|| L ||G_L||) pointwise.
  rep.nonlinear_margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    const double lhs = tf::singular_values(fr.S_tilde_w[i]).first;
    const double gx = tf::singular_values(fr.Gamma_w[i] * fr.Xc[i]).first;
    const double gl = tf::singular_values(GL.at(grid[i])).first;
    const double rhs = 1.0 / (dw_max * gx * d.line.L * gl);
    const double m = rhs / lhs;
    if (m < rep.nonlinear_margin) {
      rep.nonlinear_margin = m;
      rep.nonlinear_worst_omega = grid[i];
    }
  }
  rep.nonlinear_ok = rep.nonlinear_margin > 1.0;
  return rep;
}

}  // namespace modeshift::analysis
