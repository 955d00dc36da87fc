#pragma once

#include <limits>
#include <vector>

#include "modeshift/tfcore/rational_tf.hpp"

namespace modeshift::tf {

struct MarginReport {
  static constexpr double inf = std::numeric_limits<double>::infinity();
  double gain_margin_db = inf;
  double phase_margin_deg = inf;
  double gain_crossover = 0.0;   // rad/s, 0 when none
  double phase_crossover = 0.0;  // rad/s, 0 when none
  bool has_gain_crossover() const { return gain_crossover > 0.0; }
  bool has_phase_crossover() const { return phase_crossover > 0.0; }
};

std::vector<double> log_grid(double w_min, double w_max, int points_per_decade);
// 1e-1 .. 1e6 rad/s at 200 points/decade.
const std::vector<double>& default_grid();

// Worst-case margins over all crossings found on the grid, each refined by
// bisection in log(omega) to 1e-4 relative.
MarginReport margins(const RationalTF& open_loop,
                     const std::vector<double>& grid = default_grid());

}  // namespace modeshift::tf
