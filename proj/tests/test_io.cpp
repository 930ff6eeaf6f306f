#include "hsm/io.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using hsm::format_double;
using hsm::ParseError;

TEST_SUITE_BEGIN("io");

TEST_CASE("format_double round trips exactly") {
  const double values[] = {0.0,    1.0,     -1.0,   0.1,  1.0 / 3.0,
                           1e-300, 1e300,   -2.5e-8, 3.14159265358979,
                           1.2345678901234567e-4, 123456789.123456};
  for (double x : values) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.5) == "-0.5");
}

TEST_CASE("vector files") {
  SUBCASE("round trip") {
    Eigen::VectorXd v(4);
    v << 1.5, -2.0, 1.0 / 3.0, 0.0;
    std::stringstream s;
    hsm::write_vector(s, v);
    Eigen::VectorXd back = hsm::read_vector(s);
    REQUIRE(back.size() == v.size());
    for (int i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
  }
  SUBCASE("comments and blanks are skipped") {
    std::istringstream in("# header\n1\n\n  2.5e-1 # inline\n");
    Eigen::VectorXd v = hsm::read_vector(in);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.25);
  }
  SUBCASE("bad token reports the line") {
    std::istringstream in("1\nnope\n");
    CHECK_THROWS_WITH_AS(hsm::read_vector(in, "v.txt"),
                         doctest::Contains("v.txt:2"), ParseError);
  }
}

TEST_CASE("matrix files") {
  SUBCASE("round trip") {
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, -0.5, 1.0 / 7.0, 0;
    std::stringstream s;
    hsm::write_matrix(s, m);
    Eigen::MatrixXd back = hsm::read_matrix(s, false);
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("symmetric gate") {
    std::istringstream ok("1,2\n2,5\n");
    CHECK(hsm::read_matrix(ok, true).rows() == 2);
    std::istringstream skew("1,2\n2.0000000001,5\n");
    CHECK_THROWS_AS(hsm::read_matrix(skew, true), ParseError);
    std::istringstream rect("1,2,3\n4,5,6\n");
    CHECK_THROWS_AS(hsm::read_matrix(rect, true), ParseError);
  }
  SUBCASE("ragged and empty inputs are rejected") {
    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(hsm::read_matrix(ragged, false), ParseError);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(hsm::read_matrix(empty, false), ParseError);
  }
}

TEST_CASE("hierarchy files") {
  SUBCASE("round trip keeps ids and indices") {
    hsm::Hierarchy h = testutil::two_layer_dag();
    std::stringstream s;
    hsm::write_hierarchy(s, h, {10, 20, 30, 40, 50, 60});
    hsm::HierarchyFile back = hsm::read_hierarchy(s);
    REQUIRE(back.hierarchy.validate().ok());
    CHECK(back.hierarchy.p() == h.p());
    CHECK(back.hierarchy.node_count() == h.node_count());
    for (int i = 0; i < h.node_count(); ++i)
      CHECK(back.hierarchy.node(i) == h.node(i));
    CHECK(back.hierarchy.edges() == h.edges());
    CHECK(back.node_ids == std::vector<long long>{10, 20, 30, 40, 50, 60});
  }
  SUBCASE("file indices are one-based") {
    std::istringstream in("p 2\nnode 7 1\nnode 9 2\nedge 7 9\n");
    hsm::HierarchyFile f = hsm::read_hierarchy(in);
    CHECK(f.hierarchy.node(0) == std::vector<int>{0});
    CHECK(f.hierarchy.node(1) == std::vector<int>{1});
    CHECK(f.node_ids == std::vector<long long>{7, 9});
  }
  SUBCASE("malformed files") {
    std::istringstream no_p("node 1 1\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(no_p), ParseError);
    std::istringstream two_p("p 1\np 1\nnode 1 1\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(two_p), ParseError);
    std::istringstream bare_node("p 1\nnode 1\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(bare_node), ParseError);
    std::istringstream dup_node("p 2\nnode 1 1\nnode 1 2\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(dup_node), ParseError);
    std::istringstream ghost_edge("p 2\nnode 1 1\nnode 2 2\nedge 1 3\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(ghost_edge), ParseError);
    std::istringstream fat_edge("p 2\nnode 1 1\nnode 2 2\nedge 1 2 3\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(fat_edge), ParseError);
    std::istringstream keyword("p 1\nvertex 1 1\n");
    CHECK_THROWS_AS(hsm::read_hierarchy(keyword), ParseError);
  }
}

TEST_CASE("csv writer") {
  std::ostringstream out;
  hsm::CsvWriter w(out);
  w.metadata("experiment", "demo");
  w.header({"a", "b"});
  w.row({hsm::CsvWriter::cell(1), hsm::CsvWriter::cell(0.5)});
  w.row({hsm::CsvWriter::cell(std::string("x")), hsm::CsvWriter::cell(2.0)});
  CHECK(out.str() == "# experiment = demo\na,b\n1,0.5\nx,2\n");

  testutil::CsvTable t = testutil::parse_csv(out.str());
  REQUIRE(t.rows.size() == 2);
  CHECK(t.metadata.size() == 1);
  CHECK(t.num(0, "b") == 0.5);
  CHECK(t.cell(1, "a") == "x");
}

TEST_SUITE_END();
