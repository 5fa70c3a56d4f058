#pragma once

#include <string>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton::io {

/// Monochrome bitmap loaded from a portable bitmap/graymap file.
/// Transmission is in [0, 1]; for bitmaps the ink bits (1) transmit.
struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<double> transmission; // row-major, top row first

  double at(int x, int y) const { return transmission[static_cast<std::size_t>(y) * width + x]; }
};

/// Reads P1/P2 (ASCII) and P4/P5 (binary) files.
Bitmap load_pbm(const std::string& path);

} // namespace biphoton::io
