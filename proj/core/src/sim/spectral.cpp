#include "modeshift/sim/spectral.hpp"

#include <cmath>
#include <complex>

#include "modeshift/error.hpp"

namespace modeshift::sim {

SpectralResult spectral_extract(const std::vector<double>& x, double dt, double f, double window) {
  if (!(f > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidParams, "spectral: f and dt must be positive");
  if (window < 3.0 / f * (1.0 - 1e-9)) throw Error(ErrorCode::InvalidParams, "spectral window shorter than 3 periods");
  const double periods = std::max(1.0, std::round(window * f));
  const auto N = static_cast<size_t>(std::lround(periods / (f * dt)));
  if (N < 2 || N > x.size()) throw Error(ErrorCode::InvalidParams, "series shorter than the spectral window");

  // Prefix sums of x[n] e^{-j w n dt}; the phase is evaluated directly per
  // sample to avoid drift from recursive rotation.
  const double w = 2.0 * M_PI * f * dt;
  std::vector<std::complex<double>> acc(x.size() + 1);
  for (size_t n = 0; n < x.size(); ++n)
    acc[n + 1] = acc[n] + x[n] * std::polar(1.0, -w * static_cast<double>(n));

  SpectralResult r;
  r.window_samples = N;
  r.magnitude.reserve(x.size() - N + 1);
  r.end_index.reserve(x.size() - N + 1);
  for (size_t end = N; end <= x.size(); ++end) {
    r.magnitude.push_back(2.0 / static_cast<double>(N) * std::abs(acc[end] - acc[end - N]));
    r.end_index.push_back(end - 1);
  }
  return r;
}

double mean_magnitude(const SpectralResult& r, double dt, double t0, double t1) {
  double s = 0.0;
  size_t n = 0;
  for (size_t k = 0; k < r.magnitude.size(); ++k) {
    const double t = static_cast<double>(r.end_index[k]) * dt;
    if (t >= t0 && t <= t1) {
      s += r.magnitude[k];
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace modeshift::sim
