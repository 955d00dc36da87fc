#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace modeshift::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kAnalysisFailure = 2, kDivergence = 3 };

struct AnalyzeArgs {
  std::string file;
  std::string out;  // empty: stdout
};

struct BodeArgs {
  std::string file;
  std::string loop = "d";
  std::string inverter;  // empty: first
  double w_min = 1e-1, w_max = 1e5;
  int per_decade = 100;
  std::string out;
};

struct SimulateArgs {
  std::string file;
  std::string out;  // empty: $MODESHIFT_OUT_DIR/<name> or ./out/<name>
};

struct SweepArgs {
  std::string file;
  std::string param;
  std::vector<double> values;
  std::string inverter;              // metrics source; empty: first
  std::string signal = "theta_dot";  // step-response signal
  double t0 = -1.0;                  // step time; < 0: first event
  bool simulate = true;
  unsigned threads = 0;
  std::string out;
};

struct ModesArgs {
  std::string file;  // empty: default design
  std::string inverter;
};

// Each returns the process exit code and reports errors on err.
int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err);
int cmd_bode(const BodeArgs& a, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err);
int cmd_modes(const ModesArgs& a, std::ostream& out, std::ostream& err);

// Parses argv and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modeshift::cli
