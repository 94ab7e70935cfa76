#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccdist/group.hpp"
#include "ccdist/io.hpp"

using namespace ccdist;

namespace {

Eigen::MatrixXd heis_matrix() {
  Eigen::MatrixXd J(2, 2);
  J << 0, 1, -1, 0;
  return J;
}

GroupPoint random_pt(const StepTwoGroup& G, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  GroupPoint g{Eigen::VectorXd(G.q), Eigen::VectorXd(G.m)};
  for (int i = 0; i < G.q; ++i) g.x[i] = N(rng);
  for (int i = 0; i < G.m; ++i) g.t[i] = N(rng);
  return g;
}

}  // namespace

TEST_CASE("validate_group accepts the symplectic matrix") {
  const StepTwoGroup G = validate_group({heis_matrix()});
  CHECK(G.q == 2);
  CHECK(G.m == 1);
}

TEST_CASE("validate_group rejects a symmetric matrix") {
  Eigen::MatrixXd S(2, 2);
  S << 0, 1, 1, 0;
  CHECK_THROWS_AS(validate_group({S}), NotSkewSymmetric);
}

TEST_CASE("validate_group rejects dependent tuples") {
  CHECK_THROWS_AS(validate_group({heis_matrix(), 2.0 * heis_matrix()}), LinearlyDependent);
}

TEST_CASE("validate_group rejects mixed sizes") {
  CHECK_THROWS_AS(validate_group({heis_matrix(), Eigen::MatrixXd::Zero(3, 3)}),
                  DimensionMismatch);
}

TEST_CASE("multiply matches the worked example") {
  const StepTwoGroup G = builtin_group("heisenberg(1)");
  GroupPoint a{Eigen::VectorXd(2), Eigen::VectorXd::Zero(1)};
  GroupPoint b{Eigen::VectorXd(2), Eigen::VectorXd::Zero(1)};
  a.x << 1, 0;
  b.x << 0, 1;
  const GroupPoint c = multiply(G, a, b);
  CHECK(c.x[0] == doctest::Approx(1.0));
  CHECK(c.x[1] == doctest::Approx(1.0));
  CHECK(c.t[0] == doctest::Approx(0.5));
}

TEST_CASE("identity and inverse laws hold exactly") {
  const StepTwoGroup G = builtin_group("n32");
  std::mt19937_64 rng(7);
  const GroupPoint o = identity(G);
  for (int i = 0; i < 20; ++i) {
    const GroupPoint g = random_pt(G, rng);
    const GroupPoint lg = multiply(G, o, g);
    CHECK((lg.x - g.x).norm() == 0.0);
    CHECK((lg.t - g.t).norm() == 0.0);
    const GroupPoint e = multiply(G, g, inverse(g));
    CHECK(e.x.norm() == 0.0);
    CHECK(e.t.norm() <= 1e-15);
  }
}

TEST_CASE("associativity on random triples") {
  for (const char* name : {"heisenberg(2)", "htype(4,3)", "corank1(4)", "n32", "kolmogorov(4)"}) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 25; ++i) {
      const GroupPoint a = random_pt(G, rng), b = random_pt(G, rng), c = random_pt(G, rng);
      const GroupPoint lhs = multiply(G, multiply(G, a, b), c);
      const GroupPoint rhs = multiply(G, a, multiply(G, b, c));
      CHECK((lhs.x - rhs.x).lpNorm<Eigen::Infinity>() <= 1e-14);
      CHECK((lhs.t - rhs.t).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
  }
}

TEST_CASE("dilation is an automorphism") {
  const StepTwoGroup G = builtin_group("htype(4,3)");
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> R(0.01, 10.0);
  for (int i = 0; i < 25; ++i) {
    const GroupPoint a = random_pt(G, rng), b = random_pt(G, rng);
    const double r = R(rng);
    const GroupPoint lhs = dilate(multiply(G, a, b), r);
    const GroupPoint rhs = multiply(G, dilate(a, r), dilate(b, r));
    CHECK((lhs.x - rhs.x).norm() <= 1e-12 * (1 + lhs.x.norm()));
    CHECK((lhs.t - rhs.t).norm() <= 1e-12 * (1 + lhs.t.norm()));
  }
  CHECK_THROWS_AS(dilate(identity(G), 0.0), NonPositiveScale);
  // r = 1 and the quadratic scaling of the vertical part
  GroupPoint g{Eigen::VectorXd(4), Eigen::VectorXd(3)};
  g.x << 1, 0, 0, 0;
  g.t << 1, 0, 0;
  const GroupPoint d2 = dilate(g, 2.0);
  CHECK(d2.x[0] == doctest::Approx(2.0));
  CHECK(d2.t[0] == doctest::Approx(4.0));
}

TEST_CASE("u_tilde is linear and matches the fixture matrix") {
  const StepTwoGroup G = builtin_group("heisenberg(1)");
  Eigen::VectorXd tau(1);
  tau << 3.14159265358979323846;
  const Eigen::MatrixXd M = G.u_tilde(tau);
  CHECK(M(0, 1) == doctest::Approx(3.14159265358979323846));
  CHECK(M(1, 0) == doctest::Approx(-3.14159265358979323846));
  CHECK(G.u_tilde(Eigen::VectorXd::Zero(1)).norm() == 0.0);

  const StepTwoGroup N = builtin_group("n32");
  std::mt19937_64 rng(17);
  std::normal_distribution<double> Nd(0, 1);
  Eigen::VectorXd t1(3), t2(3);
  for (int i = 0; i < 3; ++i) {
    t1[i] = Nd(rng);
    t2[i] = Nd(rng);
  }
  const Eigen::MatrixXd lin = N.u_tilde(2.0 * t1 - 3.0 * t2);
  const Eigen::MatrixXd composed = 2.0 * N.u_tilde(t1) - 3.0 * N.u_tilde(t2);
  CHECK((lin - composed).norm() <= 1e-14);
}

TEST_CASE("builtin fixtures validate and have the advertised shapes") {
  CHECK(builtin_group("heisenberg(1)").q == 2);
  CHECK(builtin_group("n32").q == 3);
  CHECK(builtin_group("n32").m == 3);
  CHECK(builtin_group("corank1(4)").m == 1);
  CHECK(builtin_group("kolmogorov(6)").m == 3);
  CHECK_THROWS_AS(builtin_group("dodecahedron"), UnknownFixture);

  // H-type identity: U(tau)^2 = -|tau|^2 I, i.e. S(tau) = |tau|^2 I.
  const StepTwoGroup H = builtin_group("htype(4,3)");
  std::mt19937_64 rng(19);
  std::normal_distribution<double> N(0, 1);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd tau(3);
    for (int j = 0; j < 3; ++j) tau[j] = N(rng);
    const Eigen::MatrixXd Ut = H.u_tilde(tau);
    const Eigen::MatrixXd S = Ut.transpose() * Ut;
    CHECK((S - tau.squaredNorm() * Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-12);
  }
}

TEST_CASE("group JSON round trip and error reporting") {
  const StepTwoGroup G = builtin_group("htype(4,2)");
  const StepTwoGroup back = parse_group_json(group_to_json(G));
  CHECK(back.q == G.q);
  CHECK(back.m == G.m);
  for (int j = 0; j < G.m; ++j) CHECK((back.U[j] - G.U[j]).norm() == 0.0);

  CHECK_THROWS_AS(parse_group_json("{"), ParseError);
  CHECK_THROWS_AS(parse_group_json(R"({"q":2,"m":1})"), ParseError);
  // Offending index surfaces in the message.
  try {
    parse_group_json(R"({"q":2,"m":1,"U":[[[0,1],[−1]]]})");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("U[0]") != std::string::npos);
  }
  CHECK(group_digest(G) == group_digest(back));
}
