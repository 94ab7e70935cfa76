#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccdist/bessel.hpp"
#include "ccdist/reference.hpp"

using namespace ccdist;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd randn(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

Eigen::VectorXd tau_inside(const StepTwoGroup& G, std::mt19937_64& rng, int k, double fill) {
  for (;;) {
    Eigen::VectorXd tau = randn(G.m, rng);
    const double nu = std::sqrt(spectral(G, tau).max_beta());
    if (nu > 1e-9) return tau * (fill * omega_radius(k) / nu);
  }
}

}  // namespace

TEST_CASE("omega margins") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  CHECK(omega_margin(H, Eigen::VectorXd::Zero(1), 0) == doctest::Approx(kPi));
  Eigen::VectorXd tau(1);
  tau << kPi;
  CHECK(omega_margin(H, tau, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(omega_margin(H, tau, 1) ==
        doctest::Approx(bessel::zero(1, 1) - kPi).epsilon(1e-12));
}

TEST_CASE("phi on the first Heisenberg group") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
  g.x << 1, 0;
  g.t << 0.25;
  CHECK(phi(H, g, Eigen::VectorXd::Zero(1)) == doctest::Approx(1.0));
  Eigen::VectorXd tau(1);
  tau << 0.9;
  CHECK(phi(H, g, tau) ==
        doctest::Approx(0.9 / std::tan(0.9) + 4.0 * 0.25 * 0.9).epsilon(1e-13));
  // value at the maximizer for t = pi/8
  g.t << kPi / 8.0;
  tau << kPi / 2.0;
  CHECK(phi(H, g, tau) == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-13));
  tau << kPi;
  CHECK_THROWS_AS(phi(H, g, tau), DomainViolation);
}

TEST_CASE("f_k_map worked examples") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  // k = 1, s1 = 0 keeps (0, t)
  SegmentVector s = SegmentVector::zeros(1, 2);
  Eigen::VectorXd x(2), t(1);
  x << 1, 0;
  t << 0.3;
  auto [X0, T0] = f_k_map(H, x, t, s);
  CHECK(X0.norm() == 0.0);
  CHECK(T0[0] == doctest::Approx(0.3));
  // worked bilinear value
  s.s[0] << 0, 1;
  auto [X1, T1] = f_k_map(H, x, Eigen::VectorXd::Zero(1), s);
  CHECK(X1[1] == doctest::Approx(1.0));
  CHECK(T1[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  // k = 2 zeros
  SegmentVector s2 = SegmentVector::zeros(2, 2);
  auto [X2, T2] = f_k_map(H, x, t, s2);
  CHECK(X2.norm() == 0.0);
  CHECK(T2[0] == doctest::Approx(0.3));
  CHECK_THROWS_AS(f_k_map(H, x, t, SegmentVector::zeros(0, 2)), DimensionMismatch);
}

TEST_CASE("phi_k values and the level-0 consistency identity") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd X(2), T(1);
  X << 0.7, -0.2;
  T << 0.0;
  CHECK(phi_k(H, X, T, Eigen::VectorXd::Zero(1), 0) == doctest::Approx(0.0));
  // phi0((X,T);tau) = 2 (tau cot tau - 1)|X|^2 + 4 T tau
  Eigen::VectorXd tau(1);
  tau << 1.1;
  T << 0.4;
  const double expect =
      2.0 * (1.1 / std::tan(1.1) - 1.0) * X.squaredNorm() + 4.0 * 0.4 * 1.1;
  CHECK(phi_k(H, X, T, tau, 0) == doctest::Approx(expect).epsilon(1e-13));

  // |x|^2 + phi0((x/sqrt2, t); tau) = phi(g; tau)
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    GroupPoint g{randn(2, rng), randn(1, rng)};
    const Eigen::VectorXd tt = tau_inside(H, rng, 0, 0.95);
    const double lhs =
        g.x.squaredNorm() + phi_k(H, g.x / std::sqrt(2.0), g.t, tt, 0);
    CHECK(lhs == doctest::Approx(phi(H, g, tt)).epsilon(1e-12));
  }
}

TEST_CASE("phi_k_star reduces to phi at level zero") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    GroupPoint g{randn(2, rng), randn(1, rng)};
    const Eigen::VectorXd tau = tau_inside(H, rng, 0, 0.9);
    const double a = phi_k_star(H, g, SegmentVector::zeros(0, 2), tau, 0).value;
    CHECK(a == doctest::Approx(phi(H, g, tau)).epsilon(1e-13));
  }
}

TEST_CASE("phi_k_star at zero segments exercises the plumbing") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
  g.x << 1.2, 0;
  g.t << -0.3;
  Eigen::VectorXd tau(1);
  tau << 0.8;
  const double v = phi_k_star(H, g, SegmentVector::zeros(1, 2), tau, 1).value;
  CHECK(v == doctest::Approx(g.x.squaredNorm() + 4.0 * g.t[0] * 0.8).epsilon(1e-13));
}

TEST_CASE("full gradient and Hessian agree with finite differences") {
  for (const char* name : {"heisenberg(1)", "n32"}) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(99);
    for (int k : {1, 2}) {
      double worst_g = 0.0, worst_h = 0.0;
      for (int trial = 0; trial < 25; ++trial) {
        GroupPoint g{randn(G.q, rng), randn(G.m, rng)};
        SegmentVector s = SegmentVector::zeros(k, G.q);
        for (auto& sj : s.s) sj = randn(G.q, rng);
        const Eigen::VectorXd tau = tau_inside(G, rng, k, 0.7);
        const ReferenceEval ev = phi_k_star(G, g, s, tau, k, EvalMode::Full);
        const Eigen::VectorXd grad = ev.full_gradient(G.q, G.m);
        const int dim = k * G.q + G.m;
        const double step = 1e-6;
        Eigen::VectorXd z(dim);
        z << s.flatten(), tau;
        for (int c = 0; c < dim; ++c) {
          Eigen::VectorXd zp = z, zm = z;
          zp[c] += step;
          zm[c] -= step;
          const auto sp = SegmentVector::unflatten(zp.head(k * G.q), k, G.q);
          const auto sm = SegmentVector::unflatten(zm.head(k * G.q), k, G.q);
          const double fp = phi_k_star(G, g, sp, zp.tail(G.m), k, EvalMode::ValueOnly).value;
          const double fm = phi_k_star(G, g, sm, zm.tail(G.m), k, EvalMode::ValueOnly).value;
          const double fd = (fp - fm) / (2 * step);
          worst_g = std::max(worst_g, std::abs(grad[c] - fd) / (1.0 + std::abs(fd)));
          // Hessian column by finite differences of gradients.
          const Eigen::VectorXd gp =
              phi_k_star(G, g, sp, zp.tail(G.m), k, EvalMode::Full).full_gradient(G.q, G.m);
          const Eigen::VectorXd gm =
              phi_k_star(G, g, sm, zm.tail(G.m), k, EvalMode::Full).full_gradient(G.q, G.m);
          const Eigen::VectorXd hcol = (gp - gm) / (2 * step);
          worst_h = std::max(worst_h,
                             (ev.hess.col(c) - hcol).norm() / (1.0 + hcol.norm()));
        }
        CHECK((ev.hess - ev.hess.transpose()).norm() <= 1e-12 * (1.0 + ev.hess.norm()));
      }
      CHECK(worst_g <= 1e-6);
      CHECK(worst_h <= 1e-5);
    }
  }
}

TEST_CASE("evenness under (t, tau) -> (-t, -tau)") {
  const StepTwoGroup G = builtin_group("htype(4,3)");
  std::mt19937_64 rng(123);
  for (int i = 0; i < 20; ++i) {
    GroupPoint g{randn(4, rng), randn(3, rng)};
    GroupPoint gm{g.x, -g.t};
    const Eigen::VectorXd tau = tau_inside(G, rng, 0, 0.9);
    CHECK(phi(G, g, tau) == doctest::Approx(phi(G, gm, -tau)).epsilon(1e-12));
  }
}

TEST_CASE("scaling: phi is 2-homogeneous under the dilation") {
  const StepTwoGroup G = builtin_group("corank1(4)");
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> R(0.3, 2.0);
  for (int i = 0; i < 20; ++i) {
    GroupPoint g{randn(4, rng), randn(1, rng)};
    const double r = R(rng);
    const Eigen::VectorXd tau = tau_inside(G, rng, 0, 0.9);
    CHECK(phi(G, dilate(g, r), tau) == doctest::Approx(r * r * phi(G, g, tau)).epsilon(1e-12));
  }
}

TEST_CASE("midpoint concavity in tau") {
  const StepTwoGroup G = builtin_group("n32");
  std::mt19937_64 rng(7);
  for (int k : {0, 1}) {
    for (int i = 0; i < 200; ++i) {
      GroupPoint g{randn(3, rng), randn(3, rng)};
      SegmentVector s = SegmentVector::zeros(k, 3);
      for (auto& sj : s.s) sj = randn(3, rng);
      const Eigen::VectorXd t1 = tau_inside(G, rng, k, 0.98);
      const Eigen::VectorXd t2 = tau_inside(G, rng, k, 0.98);
      const double f1 = phi_k_star(G, g, s, t1, k, EvalMode::ValueOnly).value;
      const double f2 = phi_k_star(G, g, s, t2, k, EvalMode::ValueOnly).value;
      const double fm = phi_k_star(G, g, s, 0.5 * (t1 + t2), k, EvalMode::ValueOnly).value;
      CHECK(fm >= 0.5 * (f1 + f2) - 1e-10);
    }
  }
}

TEST_CASE("boundary margin is reported and guarded") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
  g.x << 1, 0;
  g.t << 0.1;
  Eigen::VectorXd tau(1);
  tau << 0.5;
  const ReferenceEval ev = phi_k_star(H, g, SegmentVector::zeros(0, 2), tau, 0);
  CHECK(ev.boundary_margin == doctest::Approx(kPi - 0.5).epsilon(1e-12));
  tau << kPi * (1.0 - 1e-12);
  CHECK_THROWS_AS(phi_k_star(H, g, SegmentVector::zeros(0, 2), tau, 0), DomainViolation);
}
