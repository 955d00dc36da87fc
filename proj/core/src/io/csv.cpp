#include "modeshift/io/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "modeshift/error.hpp"

namespace modeshift::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void CsvTable::add(std::string name, std::string unit, std::vector<double> col) {
  if (!cols.empty() && col.size() != rows())
    throw Error(ErrorCode::InvalidParams, "csv column '" + name + "' has a different length");
  names.push_back(std::move(name));
  units.push_back(std::move(unit));
  cols.push_back(std::move(col));
}

const std::vector<double>& CsvTable::col(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return cols[i];
  throw Error(ErrorCode::InvalidParams, "csv has no column '" + name + "'");
}

void write_csv(std::ostream& out, const CsvTable& t) {
  out << "# ";
  for (size_t i = 0; i < t.units.size(); ++i) out << (i ? "," : "") << t.names[i] << "[" << t.units[i] << "]";
  out << "\n";
  for (size_t i = 0; i < t.names.size(); ++i) out << (i ? "," : "") << t.names[i];
  out << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t r = 0; r < t.rows(); ++r) {
    for (size_t c = 0; c < t.cols.size(); ++c) out << (c ? "," : "") << t.cols[c][r];
    out << "\n";
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Validation, path.string() + ": cannot write");
  write_csv(out, t);
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw Error(ErrorCode::Parse, "csv: missing unit line");
  for (const auto& cell : split(line.substr(2))) {
    const auto a = cell.find('['), b = cell.rfind(']');
    t.units.push_back(a != std::string::npos && b > a ? cell.substr(a + 1, b - a - 1) : "");
  }
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "csv: missing header row");
  t.names = split(line);
  if (t.names.size() != t.units.size()) throw Error(ErrorCode::Parse, "csv: unit and header rows differ");
  t.cols.assign(t.names.size(), {});
  size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.names.size()) throw Error(ErrorCode::Parse, "csv: row " + std::to_string(row) + " width");
    for (size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str()) throw Error(ErrorCode::Parse, "csv: row " + std::to_string(row) + " not numeric");
      t.cols[c].push_back(v);
    }
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, path.string() + ": cannot open file");
  return read_csv(in);
}

std::string signal_unit(const std::string& n) {
  if (n == "ig_d" || n == "ig_q" || n == "iL_d" || n == "iL_q" || n == "ep_d" || n == "ep_q" || n == "i_load")
    return "A";
  if (n == "vc_d" || n == "vc_q" || n == "vg_d" || n == "vg_q" || n == "vg_mag" || n == "u_theta") return "V";
  if (n == "theta") return "rad";
  if (n == "theta_dot" || n == "omega_g") return "rad/s";
  if (n == "P") return "W";
  if (n == "Q") return "var";
  return "1";
}

CsvTable inverter_table(const sim::SimResult& r, size_t i) {
  CsvTable t;
  t.add("t", "s", r.t);
  const auto& tr = r.inverters.at(i);
  for (const auto& n : sim::InverterTrace::signal_names()) t.add(n, signal_unit(n), *tr.signal(n));
  return t;
}

CsvTable bus_table(const sim::SimResult& r) {
  CsvTable t;
  t.add("t", "s", r.t);
  for (const auto& n : sim::BusTrace::signal_names()) t.add(n, signal_unit(n), *r.bus.signal(n));
  return t;
}

CsvTable spectral_table(const sim::SpectralTrace& s) {
  CsvTable t;
  t.add("t", "s", s.t);
  t.add("magnitude", signal_unit(s.request.signal), s.magnitude);
  return t;
}

}  // namespace modeshift::io
