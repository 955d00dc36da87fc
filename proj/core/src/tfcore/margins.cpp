#include "modeshift/tfcore/margins.hpp"

#include <cmath>
#include <functional>

#include "modeshift/error.hpp"

namespace modeshift::tf {

std::vector<double> log_grid(double w_min, double w_max, int points_per_decade) {
  if (!(w_min > 0.0) || !(w_max > w_min) || points_per_decade < 1)
    throw Error(ErrorCode::InvalidParams, "bad frequency grid");
  const double l0 = std::log10(w_min), l1 = std::log10(w_max);
  const int n = static_cast<int>(std::ceil((l1 - l0) * points_per_decade)) + 1;
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
  return g;
}

const std::vector<double>& default_grid() {
  static const std::vector<double> g = log_grid(1e-1, 1e6, 200);
  return g;
}

namespace {

// Bisection in log(omega) on a sign change of f between wa and wb.
double bisect(const std::function<double(double)>& f, double wa, double wb) {
  double la = std::log(wa), lb = std::log(wb);
  double fa = f(wa);
  while (lb - la > 1e-4 * 0.5) {  // relative width in omega ~ 1e-4
    const double lm = 0.5 * (la + lb);
    const double fm = f(std::exp(lm));
    if ((fm > 0.0) == (fa > 0.0)) { la = lm; fa = fm; } else { lb = lm; }
  }
  return std::exp(0.5 * (la + lb));
}

double wrap_deg(double d) {
  while (d > 180.0) d -= 360.0;
  while (d <= -180.0) d += 360.0;
  return d;
}

}  // namespace

MarginReport margins(const RationalTF& L, const std::vector<double>& grid) {
  if (!L.is_proper()) throw Error(ErrorCode::ImproperTF, "open loop must be proper");
  MarginReport rep;
  std::vector<double> w;
  std::vector<cplx> v;
  w.reserve(grid.size());
  v.reserve(grid.size());
  for (double om : grid) {
    try {
      v.push_back(L.at(om));
      w.push_back(om);
    } catch (const Error&) {
      // skip grid points sitting on imaginary-axis poles
    }
  }
  auto logmag = [&](double om) { return std::log(std::abs(L.at(om))); };
  auto imag = [&](double om) { return L.at(om).imag(); };
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    const double m0 = std::log(std::abs(v[i])), m1 = std::log(std::abs(v[i + 1]));
    if ((m0 > 0.0) != (m1 > 0.0)) {
      const double wc = bisect(logmag, w[i], w[i + 1]);
      // Angular distance of L(j wc) from -1.
      const double pm = 180.0 - std::abs(wrap_deg(std::arg(L.at(wc)) * 180.0 / M_PI));
      if (!rep.has_gain_crossover() || pm < rep.phase_margin_deg) {
        rep.phase_margin_deg = pm;
        rep.gain_crossover = wc;
      }
    }
    const double i0 = v[i].imag(), i1 = v[i + 1].imag();
    if ((i0 > 0.0) != (i1 > 0.0) && v[i].real() < 0.0 && v[i + 1].real() < 0.0) {
      const double wp = bisect(imag, w[i], w[i + 1]);
      const cplx lp = L.at(wp);
      if (lp.real() < 0.0 && std::abs(lp) < 1.0) {
        const double gm = -20.0 * std::log10(std::abs(lp));
        if (!rep.has_phase_crossover() || gm < rep.gain_margin_db) {
          rep.gain_margin_db = gm;
          rep.phase_crossover = wp;
        }
      }
    }
  }
  return rep;
}

}  // namespace modeshift::tf
