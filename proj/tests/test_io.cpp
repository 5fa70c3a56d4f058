#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "biphoton/pbm.hpp"
#include "biphoton/scenarios.hpp"
#include "biphoton/table.hpp"

using namespace biphoton;
using io::OutputTable;

TEST_CASE("CSV round-trips every finite double bit-exactly") {
  OutputTable t;
  t.columns = {"y_mm", "g2"};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i)
    t.rows.push_back({u(rng) * std::pow(10.0, i % 37 - 18), u(rng)});
  t.rows.push_back({0.0, 5e-300});
  t.rows.push_back({-0.0, 1.25e300});
  const std::string path = "/tmp/biphoton_roundtrip.csv";
  io::write_csv(t, path);
  const OutputTable back = io::read_csv(path);
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      CHECK(back.rows[r][c] == t.rows[r][c]);
  std::remove(path.c_str());
}

TEST_CASE("tables reject ragged rows and non-finite values") {
  OutputTable t;
  t.columns = {"a", "b"};
  t.rows.push_back({1.0});
  CHECK_THROWS_AS(t.validate(), Error);
  t.rows[0] = {1.0, std::nan("")};
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("plot files carry metadata comments and whitespace columns") {
  OutputTable t;
  t.columns = {"x", "y"};
  t.rows = {{1.0, 2.0}, {3.0, 4.0}};
  t.tool_version = "0.1.0";
  t.config_hash = "deadbeef";
  t.seed = 7;
  const std::string path = "/tmp/biphoton_test.gp.dat";
  io::write_gp(t, path);
  std::ifstream in(path);
  std::string line1, line2, line3;
  std::getline(in, line1);
  std::getline(in, line2);
  std::getline(in, line3);
  CHECK(line1.find("seed=7") != std::string::npos);
  CHECK(line1[0] == '#');
  CHECK(line2 == "# x y");
  CHECK(line3 == "1 2");
  std::remove(path.c_str());
}

TEST_CASE("config hash tracks physics fields only") {
  using scenarios::json;
  const json a = {{"f_mm", 400.0}, {"so_mm", 600.0}};
  json b = a;
  const std::string ha = io::fnv1a_hex("ghost-image\n" + a.dump());
  CHECK(ha == io::fnv1a_hex("ghost-image\n" + b.dump()));
  b["f_mm"] = 401.0;
  CHECK(ha != io::fnv1a_hex("ghost-image\n" + b.dump()));
  CHECK(ha.size() == 16);
}

TEST_CASE("bitmap loader reads ASCII and binary forms identically") {
  const std::string p1 = "/tmp/biphoton_test.p1.pbm";
  const std::string p4 = "/tmp/biphoton_test.p4.pbm";
  // 10x4 pattern with a ragged right edge to exercise row padding
  const int w = 10, h = 4;
  std::vector<int> bits(w * h);
  for (int i = 0; i < w * h; ++i) bits[static_cast<std::size_t>(i)] = (i * 7 + i / w) % 3 == 0;
  {
    std::ofstream out(p1);
    out << "P1\n# comment line\n" << w << " " << h << "\n";
    for (int i = 0; i < w * h; ++i) out << bits[static_cast<std::size_t>(i)];
    out << "\n";
  }
  {
    std::ofstream out(p4, std::ios::binary);
    out << "P4\n" << w << " " << h << "\n";
    for (int y = 0; y < h; ++y) {
      for (int b = 0; b < (w + 7) / 8; ++b) {
        unsigned char byte = 0;
        for (int bit = 0; bit < 8; ++bit) {
          const int x = b * 8 + bit;
          if (x < w && bits[static_cast<std::size_t>(y * w + x)]) byte |= 0x80 >> bit;
        }
        out.put(static_cast<char>(byte));
      }
    }
  }
  const io::Bitmap a = io::load_pbm(p1);
  const io::Bitmap b = io::load_pbm(p4);
  REQUIRE(a.width == w);
  REQUIRE(a.height == h);
  for (int i = 0; i < w * h; ++i) {
    CHECK(a.transmission[static_cast<std::size_t>(i)] == bits[static_cast<std::size_t>(i)]);
    CHECK(b.transmission[static_cast<std::size_t>(i)] == a.transmission[static_cast<std::size_t>(i)]);
  }
  std::remove(p1.c_str());
  std::remove(p4.c_str());
  CHECK_THROWS_AS(io::load_pbm("/tmp/definitely_missing.pbm"), ConfigError);
}

TEST_CASE("graymaps scale to unit transmission") {
  const std::string p2 = "/tmp/biphoton_test.p2.pgm";
  {
    std::ofstream out(p2);
    out << "P2\n2 2\n4\n0 1 2 4\n";
  }
  const io::Bitmap g = io::load_pbm(p2);
  CHECK(g.transmission[0] == 0.0);
  CHECK(g.transmission[1] == doctest::Approx(0.25));
  CHECK(g.transmission[3] == 1.0);
  std::remove(p2.c_str());
}
