#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "modeshift/sim/simulator.hpp"

namespace modeshift::io {

// Column-major numeric table. On disk: a `#`-prefixed line of units, then a
// header row of names, then one row per sample.
struct CsvTable {
  std::vector<std::string> names, units;
  std::vector<std::vector<double>> cols;

  void add(std::string name, std::string unit, std::vector<double> col);
  const std::vector<double>& col(const std::string& name) const;  // throws when absent
  size_t rows() const { return cols.empty() ? 0 : cols.front().size(); }
};

void write_csv(std::ostream& out, const CsvTable& t);
void write_csv(const std::filesystem::path& path, const CsvTable& t);
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

// Unit of a recorded signal, e.g. "A" for ig_d.
std::string signal_unit(const std::string& name);

CsvTable inverter_table(const sim::SimResult& r, size_t i);
CsvTable bus_table(const sim::SimResult& r);
CsvTable spectral_table(const sim::SpectralTrace& s);

}  // namespace modeshift::io
