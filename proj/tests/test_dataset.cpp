#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "isosim/dataset.hpp"

using namespace isosim;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("isosim_test_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("load_csv with header and named label column") {
  const auto p = write_temp("a.csv", "a,b,species\n1,2,x\n3,4,y\n5,6,x\n");
  const auto d = load_csv(p, std::string("species"));
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  REQUIRE(d.labels);
  CHECK(*d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.label_names == std::vector<std::string>{"x", "y"});
  CHECK(d.class_count() == 2);
  CHECK(d.points(1, 1) == 4.0);
}

TEST_CASE("load_csv headerless with negative and positive label index") {
  const auto p = write_temp("b.csv", "7,1,2\n8,3,4\n");
  const auto last = load_csv(p, std::string("-1"));
  CHECK(last.dim() == 2);
  CHECK(last.points(0, 0) == 7.0);
  const auto first = load_csv(p, std::string("0"));
  CHECK(first.points(0, 0) == 1.0);
  CHECK(first.label_names == std::vector<std::string>{"7", "8"});
  const auto none = load_csv(p);
  CHECK(none.dim() == 3);
  CHECK(!none.labels);
}

TEST_CASE("load_csv rejects malformed input with a location") {
  const auto ragged = write_temp("c.csv", "1,2\n3\n");
  try {
    load_csv(ragged);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  const auto bad = write_temp("d.csv", "1,2\n3,zz\n");
  CHECK_THROWS_AS(load_csv(bad), FormatError);
  CHECK_THROWS_AS(load_csv(write_temp("e.csv", "")), FormatError);
  CHECK_THROWS(load_csv("/nonexistent/file.csv"));
}

TEST_CASE("csv round trip") {
  Dataset d;
  d.points = Matrix(2, 2);
  d.points(0, 0) = 0.125;
  d.points(1, 1) = 3.5;
  d.labels = std::vector<int>{0, 1};
  d.label_names = {"0", "1"};
  const auto p = fs::temp_directory_path() / "isosim_test_rt.csv";
  write_csv(d, p);
  const auto back = load_csv(p, std::string("label"));
  CHECK(back.points == d.points);
  CHECK(*back.labels == *d.labels);
}

TEST_CASE("min-max normalisation maps onto the unit box and is idempotent") {
  Dataset d;
  d.points = Matrix(3, 2);
  d.points(0, 0) = -2;
  d.points(1, 0) = 0.3;
  d.points(2, 0) = 7;
  for (int i = 0; i < 3; ++i) d.points(i, 1) = 5;  // constant column
  const auto [n, report] = min_max_normalize(d);
  CHECK(n.points(0, 0) == 0.0);
  CHECK(n.points(2, 0) == 1.0);
  CHECK(n.points(1, 1) == 0.0);
  CHECK(report.constant_attributes == std::set<std::size_t>{1});
  CHECK(min_max_normalize(n).first.points == n.points);
}

TEST_CASE("synthetic generators are deterministic and respect their layout") {
  const auto a = synth_two_density(100, 400, 4.0, 5);
  CHECK(a.size() == 500);
  CHECK(a.points == synth_two_density(100, 400, 4.0, 5).points);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool sparse = (*a.labels)[i] == 0;
    CHECK((sparse ? a.points(i, 0) <= 0.5 : a.points(i, 0) >= 0.5));
  }
  CHECK_THROWS_AS(synth_two_density(100, 400, 3.0, 5), PreconditionError);

  const auto h = synth_three_cluster_hard(0);
  CHECK(h.size() == 1500);
  CHECK(h.class_count() == 3);
  CHECK(h.points == synth_three_cluster_hard(0).points);
  for (double v : h.points.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}
