#include "biphoton/pbm.hpp"

#include <fstream>

namespace biphoton::io {

namespace {

// Next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  while (in) {
    const int c = in.peek();
    if (c == EOF) break;
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    in >> tok;
    return tok;
  }
  throw ConfigError("unexpected end of bitmap file");
}

int next_int(std::istream& in) {
  const std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (...) {
    throw ConfigError("bad integer in bitmap header: " + tok);
  }
}

} // namespace

Bitmap load_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open bitmap file: " + path);

  const std::string magic = next_token(in);
  if (magic != "P1" && magic != "P2" && magic != "P4" && magic != "P5")
    throw ConfigError("unsupported bitmap format " + magic + " (want P1/P2/P4/P5)");

  Bitmap bm;
  bm.width = next_int(in);
  bm.height = next_int(in);
  if (bm.width <= 0 || bm.height <= 0) throw ConfigError("bitmap dimensions must be positive");
  bm.transmission.assign(static_cast<std::size_t>(bm.width) * bm.height, 0.0);

  if (magic == "P1") {
    for (std::size_t n = 0; n < bm.transmission.size(); ++n) {
      // bits may be packed without spaces; read digit by digit
      int c = in.get();
      while (c != EOF && c != '0' && c != '1') {
        if (c == '#') {
          std::string line;
          std::getline(in, line);
        }
        c = in.get();
      }
      if (c == EOF) throw ConfigError("truncated P1 bitmap");
      bm.transmission[n] = (c == '1') ? 1.0 : 0.0;
    }
    return bm;
  }

  if (magic == "P2") {
    const int maxval = next_int(in);
    if (maxval <= 0) throw ConfigError("bad graymap maxval");
    for (std::size_t n = 0; n < bm.transmission.size(); ++n)
      bm.transmission[n] = static_cast<double>(next_int(in)) / maxval;
    return bm;
  }

  if (magic == "P5") {
    const int maxval = next_int(in);
    if (maxval <= 0 || maxval > 255) throw ConfigError("P5 maxval must be in 1..255");
    in.get(); // single whitespace after header
    for (std::size_t n = 0; n < bm.transmission.size(); ++n) {
      const int c = in.get();
      if (c == EOF) throw ConfigError("truncated P5 graymap");
      bm.transmission[n] = static_cast<double>(c) / maxval;
    }
    return bm;
  }

  // P4: packed bits, rows padded to whole bytes
  in.get();
  const int row_bytes = (bm.width + 7) / 8;
  for (int y = 0; y < bm.height; ++y) {
    for (int b = 0; b < row_bytes; ++b) {
      const int c = in.get();
      if (c == EOF) throw ConfigError("truncated P4 bitmap");
      for (int bit = 0; bit < 8; ++bit) {
        const int x = b * 8 + bit;
        if (x >= bm.width) break;
        bm.transmission[static_cast<std::size_t>(y) * bm.width + x] =
            (c & (0x80 >> bit)) ? 1.0 : 0.0;
      }
    }
  }
  return bm;
}

} // namespace biphoton::io
