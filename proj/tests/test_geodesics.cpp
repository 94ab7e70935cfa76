#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccdist/geodesics.hpp"

using namespace ccdist;

namespace {

constexpr double kPi = 3.14159265358979323846;

GroupPoint heis_point(double x0, double x1, double t) {
  GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
  g.x << x0, x1;
  g.t << t;
  return g;
}

}  // namespace

TEST_CASE("exp at zero vertical covector is a straight line") {
  const StepTwoGroup N = builtin_group("n32");
  Eigen::VectorXd zeta(3);
  zeta << 0.3, -1.2, 0.5;
  const GroupPoint e = exp_map(N, zeta, Eigen::VectorXd::Zero(3));
  CHECK((e.x - zeta).norm() <= 1e-12);
  CHECK(e.t.norm() <= 1e-12);
}

TEST_CASE("exp matches the quarter-rotation example") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd zeta(2), tauhat(1);
  zeta << 1, 0;
  tauhat << kPi;  // theta = pi/2
  const GroupPoint e = exp_map(H, zeta, tauhat, 1024);
  CHECK(e.x.norm() == doctest::Approx(2.0 / kPi).epsilon(1e-9));
  CHECK(e.t[0] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-9));
}

TEST_CASE("horizontal speed is conserved along the flow") {
  const StepTwoGroup G = builtin_group("htype(4,3)");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1);
  Eigen::VectorXd zeta(4), tauhat(3);
  for (int i = 0; i < 4; ++i) zeta[i] = N(rng);
  for (int i = 0; i < 3; ++i) tauhat[i] = N(rng);
  const Eigen::MatrixXd Ut = G.u_tilde(tauhat);
  const auto trace = exp_map_trajectory(G, zeta, tauhat, 512);
  const double speed = zeta.norm();
  double worst = 0.0;
  for (const auto& s : trace) {
    const Eigen::VectorXd u = s.xi - 0.5 * Ut * s.x;
    worst = std::max(worst, std::abs(u.norm() - speed));
  }
  CHECK(worst <= 1e-10 * speed);
}

TEST_CASE("Richardson step halving shows fourth-order convergence") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd zeta(2), tauhat(1);
  zeta << 0.7, -0.4;
  tauhat << 2.5;
  const GroupPoint fine = exp_map(H, zeta, tauhat, 4096);
  const GroupPoint a = exp_map(H, zeta, tauhat, 64);
  const GroupPoint b = exp_map(H, zeta, tauhat, 128);
  const double ea = (a.x - fine.x).norm() + (a.t - fine.t).norm();
  const double eb = (b.x - fine.x).norm() + (b.t - fine.t).norm();
  CHECK(ea / eb >= 12.0);  // ~16 for a fourth-order method
}

TEST_CASE("closed-form x-component") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd zeta(2);
  zeta << 1, 0;
  CHECK((x_component_closed_form(H, zeta, Eigen::VectorXd::Zero(1)) - zeta).norm() <= 1e-14);
  Eigen::VectorXd theta(1);
  theta << kPi / 2;
  const Eigen::VectorXd xc = x_component_closed_form(H, zeta, theta);
  const GroupPoint e = exp_map(H, zeta, 2.0 * theta, 2048);
  CHECK((xc - e.x).norm() <= 1e-9);
  theta << kPi;
  CHECK_THROWS_AS(x_component_closed_form(H, zeta, theta), SingularTheta);
}

TEST_CASE("solve_geodesics finds the unique minimizer off the axis") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  const GroupPoint g = heis_point(1, 0, kPi / 8);
  const auto records = solve_geodesics(H, g, 0, cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].energy == doctest::Approx(kPi * kPi / 4).epsilon(1e-8));
  CHECK(records[0].covector.tau[0] == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(records[0].endpoint_residual <= 1e-8 * (1 + g.norm()));
}

TEST_CASE("solve_geodesics on the vertical axis returns the minimizing family") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  const GroupPoint g = heis_point(0, 0, 1);
  const auto records = solve_geodesics(H, g, 1, cfg);
  REQUIRE(!records.empty());
  for (const auto& r : records) {
    CHECK(r.energy >= 4 * kPi - 1e-6);
    CHECK(r.endpoint_residual <= 1e-8 * (1 + g.norm()));
  }
  CHECK(records.front().energy == doctest::Approx(4 * kPi).epsilon(1e-6));
}

TEST_CASE("energy equals the reference value at critical points") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  const GroupPoint g = heis_point(0.9, 0.3, -0.4);
  const auto crits = critical_points(H, g, 1, cfg);
  REQUIRE(!crits.empty());
  for (const auto& cp : crits) {
    const auto rec = recover_geodesic(H, g, cp.theta);
    REQUIRE(rec.has_value());
    CHECK(rec->energy == doctest::Approx(cp.value).epsilon(1e-8));
  }
}

TEST_CASE("cut locus verdicts on representative points") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  CHECK(cut_locus_test(H, heis_point(1, 0, kPi / 8), cfg).verdict == CutVerdict::NotCut);
  CHECK(cut_locus_test(H, heis_point(0, 0, 1), cfg).verdict == CutVerdict::Cut);
  const CutLocusVerdict vo = cut_locus_test(H, heis_point(0, 0, 0), cfg);
  CHECK(vo.verdict == CutVerdict::Unknown);
  CHECK(!vo.note.empty());
}

TEST_CASE("classifier smoke on the first Heisenberg group") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  const GmClassification c = classify_gm(H, 50, 7, cfg);
  CHECK(c.fraction >= 0.95);
  CHECK(c.evidence.empty());
}
