#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton::io {

/// Rectangular numeric table with unit-suffixed column names and run
/// metadata.  All values must be finite.
struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string tool_version;
  std::string config_hash;
  std::uint64_t seed = 0;

  void validate() const;
};

/// RFC-4180 subset: header row plus numeric rows, '.' decimal separator,
/// 17 significant digits so a read-back reproduces the doubles bit-exactly.
void write_csv(const OutputTable& table, const std::string& path);
OutputTable read_csv(const std::string& path);

/// Gnuplot-style whitespace columns with a '#' metadata header.
void write_gp(const OutputTable& table, const std::string& path);

/// 17-significant-digit decimal form of a double.
std::string format_double(double v);

/// FNV-1a hash of a canonical string, as fixed-width hex.
std::string fnv1a_hex(const std::string& payload);

} // namespace biphoton::io
