#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "modeshift/sim/scenario.hpp"

namespace modeshift::io {

// TOML scenario files. Unknown keys are rejected with their line number.
// Angular frequencies are given in rad/s; every such key also accepts a
// `<key>_hz` spelling in Hz.
sim::Scenario parse_scenario(std::string_view text, std::string_view source = "<string>");
sim::Scenario load_scenario(const std::filesystem::path& path);

// Canonical text; parse_scenario(serialize_scenario(s)) == s for any parsed s.
std::string serialize_scenario(const sim::Scenario& sc);

// Copy of sc with the numeric field at a dotted path replaced, e.g.
// "solver.duration", "inverters.inv1.line.L" or "inverters.0.synth.a_d".
// Throws Error(UnresolvablePath) when the path names no numeric field.
sim::Scenario with_param(const sim::Scenario& sc, std::string_view path, double value);

// FNV-1a over the canonical text without name and description.
std::uint64_t scenario_hash(const sim::Scenario& sc);
std::string hash_hex(std::uint64_t h);

}  // namespace modeshift::io
