#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccdist/io.hpp"

using namespace ccdist;

TEST_CASE("point parsing") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  const GroupPoint g = parse_point("1,0;0.5", H);
  CHECK(g.x[0] == 1.0);
  CHECK(g.x[1] == 0.0);
  CHECK(g.t[0] == 0.5);
  CHECK_THROWS_AS(parse_point("1,0", H), ParseError);
  CHECK_THROWS_AS(parse_point("1;0.5", H), ParseError);
  CHECK_THROWS_AS(parse_point("1,0;0.5,2", H), ParseError);
  CHECK_THROWS_AS(parse_point("1,zebra;0.5", H), ParseError);
}

TEST_CASE("format_double round trips") {
  for (double v : {1.0, 0.1, 3.141592653589793, -2.2250738585072014e-308, 12345.678901234567}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("load_group accepts builtin names") {
  const StepTwoGroup G = load_group("htype(4,2)");
  CHECK(G.q == 4);
  CHECK(G.m == 2);
  CHECK_THROWS_AS(load_group("nonexistent-fixture"), UnknownFixture);
}

TEST_CASE("digest is stable and distinguishes groups") {
  const StepTwoGroup A = builtin_group("heisenberg(1)");
  const StepTwoGroup B = builtin_group("n32");
  CHECK(group_digest(A) == group_digest(A));
  CHECK(group_digest(A) != group_digest(B));
}
