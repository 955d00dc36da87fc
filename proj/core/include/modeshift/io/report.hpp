#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modeshift/analysis/analysis.hpp"
#include "modeshift/io/csv.hpp"
#include "modeshift/sim/scenario.hpp"

namespace modeshift::io {

inline constexpr int kSchemaVersion = 1;

struct DesignAnalysis {
  std::string id;
  analysis::StabilityReport stability;
  analysis::ModeReport mode;
  analysis::SyncDiagnostics sync;
  std::vector<std::string> warnings;
  bool pass = false;  // every stability verdict holds
};

analysis::Design design_of(const sim::InverterConfig& cfg);
DesignAnalysis analyze_inverter(const sim::InverterConfig& cfg);
std::string analysis_json(const sim::Scenario& sc, const std::vector<DesignAnalysis>& results);

enum class Loop { D, Q, Ttheta, Tv, Eps, Sigma };
// Accepts d, q, Ttheta, Tv, eps, sigma (and the Greek spellings).
// Throws Error(UnknownLoop).
Loop loop_from(const std::string& name);
const char* to_string(Loop l);

// Frequency response of the chosen loop on a log grid in rad/s.
//   d, q:    open loops K G~M, magnitude in dB and phase in degrees
//   Ttheta, Tv: the q-axis inertial split
//   eps:     coupling magnitude sigma(S~) sigma(Gamma - I)
//   sigma:   singular values of the MIMO sensitivity
CsvTable bode(const sim::InverterConfig& cfg, Loop loop, const std::vector<double>& grid);

// Mode table and where the design sits on the kappa continuum.
std::string modes_text(const sim::InverterConfig& cfg);

}  // namespace modeshift::io
