#include "modeshift/sim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "modeshift/error.hpp"

namespace modeshift::sim {

double window_mean(const std::vector<double>& t, const std::vector<double>& x, double t1, double span,
                   double period) {
  if (t.size() != x.size() || t.empty()) throw Error(ErrorCode::InvalidParams, "window_mean: bad series");
  if (period > 0.0 && span >= period) span = std::floor(span / period + 1e-9) * period;
  const double t0 = t1 - span;
  double s = 0.0;
  size_t n = 0;
  for (size_t k = 0; k < t.size(); ++k)
    if (t[k] > t0 && t[k] <= t1 + 1e-12) {
      s += x[k];
      ++n;
    }
  if (n == 0) throw Error(ErrorCode::InvalidParams, "window_mean: empty window");
  return s / static_cast<double>(n);
}

StepMetrics step_metrics(const std::vector<double>& t, const std::vector<double>& x, double t0, double rel_band,
                         double abs_band, double period) {
  StepMetrics m;
  const double tail = std::max(5.0 * period, 0.1 * (t.back() - t0));
  m.initial = window_mean(t, x, t0, std::min(t0 - t.front(), 2.0 * period), period);
  m.final = window_mean(t, x, t.back(), tail, period);
  const double span = std::abs(m.final - m.initial);
  const double dir = m.final >= m.initial ? 1.0 : -1.0;
  double peak = 0.0;
  for (size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t0) peak = std::max(peak, dir * (x[k] - m.final));
  m.overshoot = span > 0.0 ? peak / span : 0.0;

  const double band = std::max(rel_band * span, abs_band);
  double last_out = t0;
  for (size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t0 && std::abs(x[k] - m.final) > band) last_out = t[k];
  m.settling = last_out - t0;
  m.settled = last_out < t.back() - tail;
  return m;
}

}  // namespace modeshift::sim
