#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccdist/heatkernel.hpp"
#include "ccdist/oracle.hpp"

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

TEST_CASE("normalization pinned at the identity") {
  // The 1D integral of lambda/sinh(lambda) equals pi^2/2 exactly, so
  // p_1(o) = C * pi^2 / 2 = 1/16 under the chosen constant.
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  const HeatKernelEstimate est = heat_kernel(H, identity(H), 1.0, quad);
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(1.0 / 16.0).epsilon(1e-9));
  CHECK(heat_constant(2, 1) == doctest::Approx(1.0 / (8 * kPi * kPi)).epsilon(1e-15));
}

TEST_CASE("kernel symmetry under inversion") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  const GroupPoint g = heis_point(0.7, -0.3, 0.4);
  const HeatKernelEstimate a = heat_kernel(H, g, 0.5, quad);
  const HeatKernelEstimate b = heat_kernel(H, inverse(g), 0.5, quad);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
}

TEST_CASE("positivity and realness on random samples") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  quad.rel_tol = 1e-7;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.2, 1.2), Hd(0.2, 2.0);
  for (int i = 0; i < 50; ++i) {
    const GroupPoint g = heis_point(U(rng), U(rng), U(rng));
    const HeatKernelEstimate est = heat_kernel(H, g, Hd(rng), quad);
    CHECK(est.converged);
    CHECK(est.value > 0.0);
    CHECK(est.imag_residual <= 10.0 * std::max(est.quad_error, 1e-12));
  }
}

TEST_CASE("lifted kernel reproduces the heat kernel at level zero") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  const double h = 0.8;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const GroupPoint g = heis_point(U(rng), U(rng), U(rng));
    const HeatKernelEstimate ph = heat_kernel(H, g, h, quad);
    Eigen::VectorXd X = g.x / std::sqrt(2.0);
    const HeatKernelEstimate p0 = p_k_h(H, 0, X, g.t, h, quad);
    const double expect =
        heat_constant_tilde(2, 1) * std::exp(-g.x.squaredNorm() / (4 * h)) * p0.value;
    CHECK(ph.value == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("recursion relation at level zero") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  quad.hermite_order = 20;
  Eigen::VectorXd X(2), T(1);
  X << 1.0 / std::sqrt(2.0), 0.0;
  T << 0.1;
  const RelationReport rep = verify_relation_pk(H, 0, X, T, 1.0, quad);
  CHECK(rep.converged);
  CHECK(rep.rel_discrepancy <= 0.01);
  // X = 0 reduces to a pure Gaussian smoothing identity.
  const RelationReport rep0 =
      verify_relation_pk(H, 0, Eigen::VectorXd::Zero(2), T, 1.0, quad);
  CHECK(rep0.rel_discrepancy <= 0.005);
}

TEST_CASE("varadhan estimates approach the squared distance") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  const GroupPoint g = heis_point(1, 0, kPi / 8);
  const VaradhanResult vr = varadhan_estimate(H, g, {1e-1, 3e-2, 1e-2}, quad);
  CHECK(vr.all_converged);
  CHECK(vr.monotone);
  const double d2 = kPi * kPi / 4;
  CHECK(std::abs(vr.extrapolated - d2) / d2 <= 0.05);
  // Identity point: estimates collapse to zero.
  const VaradhanResult vo = varadhan_estimate(H, identity(H), {1e-1, 3e-2}, quad);
  for (double est : vo.estimates) CHECK(std::abs(est) <= 0.2);
}

TEST_CASE("leading term matches the kernel in the small-time limit") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  SolverConfig cfg;
  const GroupPoint g = heis_point(1, 0, kPi / 8);
  double prev_gap = 1e300;
  for (double h : {1e-2, 1e-3}) {
    const HeatKernelEstimate hk = heat_kernel(H, g, h, quad);
    const AsymptoticTerm lead = asymptotic_leading_term(H, g, 0, h, cfg);
    const double ratio = std::exp(hk.log_value - lead.log_value);
    CHECK(std::abs(ratio - 1.0) <= 0.1);
    CHECK(std::abs(ratio - 1.0) <= prev_gap);  // first order in h
    prev_gap = std::abs(ratio - 1.0);
  }
  // theta = 0 case: pure Gaussian-type prefactor, no blowup.
  const AsymptoticTerm flat = asymptotic_leading_term(H, heis_point(1, 0, 0), 0, 1e-2, cfg);
  CHECK(flat.theta.norm() <= 1e-8);
  // Points without an interior maximizer are rejected.
  CHECK_THROWS_AS(asymptotic_leading_term(H, heis_point(0, 0, 1), 0, 1e-2, cfg), NotInM);
}

TEST_CASE("level-k leading term approximates the lifted kernel") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  SolverConfig cfg;
  // (X, T) with an interior maximizer of the level-1 objective.
  GroupPoint g = heis_point(0.9, 0.0, 0.05);
  const double h = 1e-3;
  const HeatKernelEstimate pk = p_k_h(H, 1, g.x, g.t, h, quad);
  const AsymptoticTerm lead = asymptotic_leading_term(H, g, 1, h, cfg);
  const double ratio = std::exp(pk.log_value - lead.log_value);
  CHECK(std::abs(ratio - 1.0) <= 0.15);
}

TEST_CASE("dimension guard") {
  // m = 4 exceeds the tensor quadrature support.
  std::vector<Eigen::MatrixXd> Us;
  for (int j = 0; j < 4; ++j) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, 6);
    const int a = j % 3, b = 3 + ((j + 1) % 3);
    M(a, b) = 1;
    M(b, a) = -1;
    Us.push_back(M);
  }
  const StepTwoGroup G = validate_group(Us);
  QuadConfig quad;
  GroupPoint g{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(heat_kernel(G, g, 1.0, quad), UnsupportedDimension);
}
