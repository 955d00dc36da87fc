#pragma once

#include <cstddef>
#include <vector>

namespace modeshift::sim {

struct StepMetrics {
  double initial = 0.0;     // mean just before t0
  double final = 0.0;       // mean over the last `tail` seconds
  double overshoot = 0.0;   // peak excursion beyond final, fraction of |final - initial|
  double settling = 0.0;    // s after t0 until x stays inside the band
  bool settled = false;
};

// Step-response figures of x(t) for a step applied at t0. The band is
// rel_band * |final - initial| (abs_band when that is larger). Averages use
// whole periods of `period` so a residual ripple at that period cancels.
StepMetrics step_metrics(const std::vector<double>& t, const std::vector<double>& x, double t0, double rel_band,
                         double abs_band = 0.0, double period = 1.0 / 60.0);

// Mean of x over [t1 - span, t1], span rounded down to whole periods.
double window_mean(const std::vector<double>& t, const std::vector<double>& x, double t1, double span,
                   double period = 1.0 / 60.0);

}  // namespace modeshift::sim
