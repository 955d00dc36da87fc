#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "modeshift/sim/simulator.hpp"

namespace modeshift::io {

const char* toolkit_version();

// Everything needed to re-run a simulation bit-identically. The canonical
// scenario text is embedded; the hash covers all fields except the name and
// description.
struct RunManifest {
  std::string scenario_name;
  std::string scenario_hash;
  std::string version;
  std::string started_utc;
  sim::SolverSettings solver;
  double wall_clock_s = 0.0;
  bool completed = true;
  std::string failure;
  std::vector<std::string> files;  // relative to the output directory
  std::string scenario_text;
};

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(std::string_view text);

// Writes one CSV per inverter, a bus CSV, one CSV per spectral extract and,
// last, manifest.json. Creates dir when missing.
RunManifest write_run(const std::filesystem::path& dir, const sim::Scenario& sc, const sim::SimResult& r,
                      double wall_clock_s, const std::string& started_utc);

std::string utc_now();

}  // namespace modeshift::io
