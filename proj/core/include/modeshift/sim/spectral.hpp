#pragma once

#include <cstddef>
#include <vector>

namespace modeshift::sim {

struct SpectralResult {
  std::vector<double> magnitude;  // amplitude of the f component
  std::vector<size_t> end_index;  // sample index where each window ends
  size_t window_samples = 0;
};

// Sliding single-bin DFT. The window is rounded to a whole number of
// periods of f, so a pure sinusoid of amplitude A reads A and DC reads 0.
// Throws InvalidParams when window < 3/f or the series is shorter than it.
SpectralResult spectral_extract(const std::vector<double>& series, double sample_period, double f_hz,
                                double window);

// Mean of the magnitude trace over windows ending in [t0, t1].
double mean_magnitude(const SpectralResult& r, double sample_period, double t0, double t1);

}  // namespace modeshift::sim
