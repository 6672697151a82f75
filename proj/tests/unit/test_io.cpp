#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dynmap/io.hpp"
#include "oracles.hpp"

using namespace dynmap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dynmap_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const fs::path p = path / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }
};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::config;
}

}  // namespace

TEST_CASE("csv parsing") {
  std::istringstream in("\xEF\xBB\xBF" "a, b ,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n2,3,4\n");
  const io::CsvTable t = io::read_csv(in, "mem");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x, y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.lines[1] == 4);
  CHECK(t.column("c") == 2);
  CHECK(kind_of([&] { (void)t.column("zz"); }) == ErrorKind::config);

  std::istringstream ragged("a,b\n1\n");
  CHECK(kind_of([&] { io::read_csv(ragged, "mem"); }) == ErrorKind::parse);
  std::istringstream open("a\n\"oops\n");
  CHECK(kind_of([&] { io::read_csv(open, "mem"); }) == ErrorKind::parse);
}

TEST_CASE("number parsing names the location") {
  CHECK(io::parse_double(" 2.5 ", "f.csv", 3) == 2.5);
  CHECK(io::parse_double("-1e-3", "f.csv", 3) == -1e-3);
  try {
    io::parse_double("abc", "f.csv", 7);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find("f.csv:7") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_double("nan", "f", 1), Error);
  CHECK_THROWS_AS(io::parse_double("inf", "f", 1), Error);
  CHECK_THROWS_AS(io::parse_double("1.5x", "f", 1), Error);
}

TEST_CASE("edgelist round trip with custom columns") {
  TempDir dir;
  const std::vector<EdgeRow> rows{{"2001", "a", "b", 0.25}, {"2001", "a", "c", 0.5}, {"2002", "b", "c", 1.0 / 3.0}};
  std::ostringstream out;
  io::write_edgelist(out, rows);
  const std::string path = dir.file("edges.csv", out.str());
  const std::vector<EdgeRow> back = io::read_edgelist(path, io::EdgeColumns{});
  REQUIRE(back.size() == 3);
  CHECK(back[2].score == rows[2].score);
  CHECK(back[1].id_j == "c");

  const std::string custom = dir.file("custom.csv", "year,firm1,firm2,sim\n1999,x,y,0.1\n");
  const std::vector<EdgeRow> c = io::read_edgelist(custom, {"year", "firm1", "firm2", "sim"});
  REQUIRE(c.size() == 1);
  CHECK(c[0].period == "1999");
  CHECK(kind_of([&] { io::read_edgelist(custom, io::EdgeColumns{}); }) == ErrorKind::config);
  const std::string bad = dir.file("bad.csv", "period,id_i,id_j,score\n1,a,b,zero\n");
  CHECK(kind_of([&] { io::read_edgelist(bad, io::EdgeColumns{}); }) == ErrorKind::parse);
  CHECK(kind_of([&] { io::read_edgelist(dir.file("missing.csv"), io::EdgeColumns{}); }) == ErrorKind::parse);
}

TEST_CASE("matrix sequence round trip") {
  TempDir dir;
  std::mt19937_64 rng(3);
  DissimilaritySequence d = make_sequence({oracle::random_dissimilarity(4, rng), oracle::random_dissimilarity(4, rng)});
  d.labels = {"w", "x", "y", "z"};
  d.periods = {"2010", "2011"};
  std::ostringstream out;
  io::write_matrices(out, d);
  const DissimilaritySequence back = io::read_matrices(dir.file("m.csv", out.str()));
  CHECK(back.labels == d.labels);
  CHECK(back.periods == d.periods);
  for (std::size_t t = 0; t < 2; ++t) CHECK(back.matrices[t] == d.matrices[t]);

  CHECK(kind_of([&] { io::read_matrices(dir.file("short.csv", "period,row_label,col_label,value\n1,a,b,1\n1,a,c,2\n")); }) ==
        ErrorKind::data);
  CHECK(kind_of([&] {
          io::read_matrices(dir.file("conflict.csv", "period,row_label,col_label,value\n1,a,b,1\n1,b,a,2\n"));
        }) == ErrorKind::data);
}

TEST_CASE("mask round trip") {
  TempDir dir;
  InclusionMask m = InclusionMask::all(3, 3);
  m.included[0][2] = 0;
  const std::vector<std::string> periods{"p1", "p2", "p3"};
  const std::vector<std::string> labels{"a", "b", "c"};
  std::ostringstream out;
  io::write_mask(out, m, periods, labels);
  const std::string path = dir.file("mask.csv", out.str());
  const InclusionMask back = io::read_mask(path, periods, labels);
  CHECK(back.included == m.included);
  CHECK(kind_of([&] { io::read_mask(path, periods, {"a", "b", "q"}); }) == ErrorKind::data);
  const std::string bad = dir.file("bad.csv", "period,label,included\np1,a,2\n");
  CHECK(kind_of([&] { io::read_mask(bad, periods, labels); }) == ErrorKind::parse);
}

TEST_CASE("coordinate round trip") {
  TempDir dir;
  std::mt19937_64 rng(4);
  ConfigurationSequence x;
  x.coords = {oracle::random_matrix(3, 2, rng), oracle::random_matrix(3, 2, rng)};
  std::ostringstream out;
  io::write_coordinates(out, x, {"1", "2"}, {"a", "b", "c"});
  CHECK(out.str().rfind("period,label,dim1,dim2\n", 0) == 0);
  const io::LabeledConfiguration back = io::read_coordinates(dir.file("c.csv", out.str()));
  CHECK(back.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(back.periods == std::vector<std::string>{"1", "2"});
  for (std::size_t t = 0; t < 2; ++t) CHECK(back.x.coords[t] == x.coords[t]);

  const std::string dup = dir.file("dup.csv", "period,label,dim1\n1,a,0\n1,a,1\n");
  CHECK(kind_of([&] { io::read_coordinates(dup); }) == ErrorKind::data);
}

TEST_CASE("manifest round trip") {
  io::Manifest m;
  m.set("method", "mds");
  m.set("alpha", 0.1);
  m.set("alpha", 0.2);
  CHECK(m.get("alpha") == "0.2");
  CHECK(m.entries().size() == 2);
  CHECK(m.has("method"));
  CHECK_FALSE(m.has("p"));
  CHECK_THROWS_AS(m.get("p"), Error);
  CHECK_THROWS_AS(m.set("a=b", "x"), Error);
  std::ostringstream out;
  m.write(out);
  std::istringstream in(out.str());
  CHECK(io::Manifest::read(in) == m);
  std::istringstream broken("novalue\n");
  CHECK_THROWS_AS(io::Manifest::read(broken), Error);
}

TEST_CASE("shortest double formatting round trips") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double v = normal(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
}
