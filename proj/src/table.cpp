#include "biphoton/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace biphoton::io {

void OutputTable::validate() const {
  if (columns.empty()) throw Error("table needs at least one column");
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw Error("table rows must be rectangular");
    for (double v : row)
      if (!std::isfinite(v)) throw Error("table values must be finite");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const OutputTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

OutputTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  OutputTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hdr(line);
  std::string cell;
  while (std::getline(hdr, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  t.validate();
  return t;
}

void write_gp(const OutputTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "# version=" << table.tool_version << " config=" << table.config_hash
      << " seed=" << table.seed << "\n#";
  for (const auto& c : table.columns) out << " " << c;
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_double(row[c]);
    out << "\n";
  }
}

std::string fnv1a_hex(const std::string& payload) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace biphoton::io
