#include "modeshift/io/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "modeshift/error.hpp"
#include "modeshift/io/csv.hpp"
#include "modeshift/io/report.hpp"
#include "modeshift/io/scenario_io.hpp"

#ifndef MODESHIFT_VERSION
#define MODESHIFT_VERSION "0.0.0"
#endif

namespace modeshift::io {

using nlohmann::json;

const char* toolkit_version() { return MODESHIFT_VERSION; }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  const auto& s = m.solver;
  json j{{"schema_version", kSchemaVersion},
         {"kind", "run_manifest"},
         {"scenario", m.scenario_name},
         {"scenario_hash", m.scenario_hash},
         {"version", m.version},
         {"started_utc", m.started_utc},
         {"wall_clock_s", m.wall_clock_s},
         {"solver",
          {{"physics_dt", s.physics_dt},
           {"control_Ts", s.control_Ts},
           {"duration", s.duration},
           {"decimation", s.decimation},
           {"seed", s.seed}}},
         {"completed", m.completed},
         {"partial", !m.completed},
         {"failure", m.failure},
         {"files", m.files},
         {"scenario_toml", m.scenario_text}};
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunManifest m;
    m.scenario_name = j.at("scenario").get<std::string>();
    m.scenario_hash = j.at("scenario_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.started_utc = j.at("started_utc").get<std::string>();
    m.wall_clock_s = j.at("wall_clock_s").get<double>();
    const json& s = j.at("solver");
    m.solver.physics_dt = s.at("physics_dt").get<double>();
    m.solver.control_Ts = s.at("control_Ts").get<double>();
    m.solver.duration = s.at("duration").get<double>();
    m.solver.decimation = s.at("decimation").get<int>();
    m.solver.seed = s.at("seed").get<unsigned>();
    m.completed = j.at("completed").get<bool>();
    m.failure = j.at("failure").get<std::string>();
    m.files = j.at("files").get<std::vector<std::string>>();
    m.scenario_text = j.at("scenario_toml").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("manifest: ") + e.what());
  }
}

RunManifest write_run(const std::filesystem::path& dir, const sim::Scenario& sc, const sim::SimResult& r,
                      double wall_clock_s, const std::string& started_utc) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Validation, dir.string() + ": " + ec.message());

  RunManifest m;
  m.scenario_name = sc.name;
  m.scenario_hash = hash_hex(scenario_hash(sc));
  m.version = toolkit_version();
  m.started_utc = started_utc;
  m.solver = sc.solver;
  m.wall_clock_s = wall_clock_s;
  m.completed = r.completed;
  m.failure = r.failure;
  m.scenario_text = serialize_scenario(sc);

  for (size_t i = 0; i < r.inverters.size(); ++i) {
    const std::string f = "inverter_" + r.inverters[i].id + ".csv";
    write_csv(dir / f, inverter_table(r, i));
    m.files.push_back(f);
  }
  write_csv(dir / "bus.csv", bus_table(r));
  m.files.push_back("bus.csv");
  for (size_t i = 0; i < r.spectral.size(); ++i) {
    const auto& q = r.spectral[i].request;
    const std::string f = "spectral_" + std::to_string(i) + "_" + (q.inverter.empty() ? "bus" : q.inverter) + "_" +
                          q.signal + ".csv";
    write_csv(dir / f, spectral_table(r.spectral[i]));
    m.files.push_back(f);
  }

  // Written last: its presence marks a finished run directory.
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCode::Validation, (dir / "manifest.json").string() + ": cannot write");
  out << manifest_json(m);
  return m;
}

}  // namespace modeshift::io
