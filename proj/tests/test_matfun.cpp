#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ccdist/matfun.hpp"

using namespace ccdist;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd randn(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

// tau scaled so that S(tau) stays well inside the cot domain.
Eigen::VectorXd safe_tau(const StepTwoGroup& G, std::mt19937_64& rng, double fill) {
  for (;;) {
    Eigen::VectorXd tau = randn(G.m, rng);
    const double nu = std::sqrt(spectral(G, tau).max_beta());
    if (nu > 1e-9) return tau * (fill * kPi / nu);
  }
}

}  // namespace

TEST_CASE("spectral data on the fixtures") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd tau(1);
  tau << 1.0;
  const SpectralData sd = spectral(H, tau);
  CHECK(sd.beta[0] == doctest::Approx(1.0));
  CHECK(sd.beta[1] == doctest::Approx(1.0));
  CHECK((sd.basis.transpose() * sd.basis - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);

  const SpectralData sd0 = spectral(H, Eigen::VectorXd::Zero(1));
  CHECK(sd0.beta.maxCoeff() == 0.0);

  const StepTwoGroup Q = builtin_group("htype(4,3)");
  std::mt19937_64 rng(5);
  Eigen::VectorXd t3 = randn(3, rng).normalized();
  const SpectralData sdq = spectral(Q, t3);
  for (int i = 0; i < 4; ++i) CHECK(sdq.beta[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruction invariant") {
  const StepTwoGroup N = builtin_group("n32");
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd tau = randn(3, rng);
    const SpectralData sd = spectral(N, tau);
    const Eigen::MatrixXd Ut = N.u_tilde(tau);
    const Eigen::MatrixXd S = Ut.transpose() * Ut;
    const Eigen::MatrixXd R = sd.basis * sd.beta.asDiagonal() * sd.basis.transpose();
    CHECK((R - S).norm() <= 1e-10 * (1.0 + S.norm()));
  }
}

TEST_CASE("cot kernel values") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  // tau = 0: identity matrix
  const Eigen::MatrixXd I0 = apply_even(cot_kernel(), spectral(H, Eigen::VectorXd::Zero(1)));
  CHECK((I0 - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-14);
  // tau = 1: cot(1) I
  Eigen::VectorXd tau(1);
  tau << 1.0;
  const Eigen::MatrixXd C = apply_even(cot_kernel(), spectral(H, tau));
  CHECK(C(0, 0) == doctest::Approx(1.0 / std::tan(1.0)).epsilon(1e-13));
  CHECK(std::abs(C(0, 1)) <= 1e-14);
  // domain violation at the boundary
  tau << kPi;
  CHECK_THROWS_AS(apply_even(cot_kernel(), spectral(H, tau)), DomainViolation);
}

TEST_CASE("quadratic form values") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd x(2);
  x << 1, 0;
  CHECK(quadratic_form(H, cot_kernel(), Eigen::VectorXd::Zero(1), x) == doctest::Approx(1.0));
  Eigen::VectorXd tau(1);
  tau << kPi / 2;
  CHECK(std::abs(quadratic_form(H, cot_kernel(), tau, x)) <= 1e-14);
  CHECK(quadratic_form(H, inv_sinc_kernel(), Eigen::VectorXd::Zero(1), x) ==
        doctest::Approx(1.0));
}

TEST_CASE("gradient matches the stationarity example") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd x(2), tau(1);
  x << 1, 0;
  tau << kPi / 2;
  const Eigen::VectorXd g = grad_quadratic_form(H, cot_kernel(), tau, x);
  CHECK(g[0] == doctest::Approx(-kPi / 2).epsilon(1e-12));
  CHECK(grad_quadratic_form(H, cot_kernel(), tau, Eigen::VectorXd::Zero(2)).norm() == 0.0);
}

TEST_CASE("hessian matches the Taylor coefficient at zero") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd x(2);
  x << 1, 0;
  const Eigen::MatrixXd hess =
      hessian_quadratic_form(H, cot_kernel(), Eigen::VectorXd::Zero(1), x);
  CHECK(hess(0, 0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("derivatives agree with finite differences on every fixture") {
  for (const char* name : {"heisenberg(1)", "htype(4,3)", "corank1(4)", "n32"}) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(42);
    double worst_g = 0.0, worst_h = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd tau = safe_tau(G, rng, 0.6);
      const Eigen::VectorXd x = randn(G.q, rng);
      const QuadFormDerivs d = quad_form_derivs(G, cot_kernel(), spectral(G, tau), x, true);
      const double fd_step = 1e-5;
      for (int j = 0; j < G.m; ++j) {
        Eigen::VectorXd tp = tau, tm = tau;
        tp[j] += fd_step;
        tm[j] -= fd_step;
        const double fd =
            (quadratic_form(G, cot_kernel(), tp, x) - quadratic_form(G, cot_kernel(), tm, x)) /
            (2 * fd_step);
        worst_g = std::max(worst_g, std::abs(d.grad[j] - fd) / (1.0 + std::abs(fd)));
        const Eigen::VectorXd gp = grad_quadratic_form(G, cot_kernel(), tp, x);
        const Eigen::VectorXd gm = grad_quadratic_form(G, cot_kernel(), tm, x);
        for (int l = 0; l < G.m; ++l) {
          const double fdh = (gp[l] - gm[l]) / (2 * fd_step);
          worst_h = std::max(worst_h, std::abs(d.hess(j, l) - fdh) / (1.0 + std::abs(fdh)));
        }
      }
      CHECK((d.hess - d.hess.transpose()).norm() <= 1e-12 * (1.0 + d.hess.norm()));
    }
    CHECK(worst_g <= 1e-7);
    CHECK(worst_h <= 1e-5);
  }
}

TEST_CASE("orthogonal conjugation invariance") {
  const StepTwoGroup G = builtin_group("n32");
  std::mt19937_64 rng(77);
  // Random orthogonal matrix from QR.
  Eigen::MatrixXd A(3, 3);
  for (int i = 0; i < 3; ++i) A.row(i) = randn(3, rng).transpose();
  const Eigen::MatrixXd O = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
  std::vector<Eigen::MatrixXd> Us;
  for (const auto& U : G.U) Us.push_back(O.transpose() * U * O);
  const StepTwoGroup Gc = validate_group(Us);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd tau = safe_tau(G, rng, 0.7);
    const Eigen::VectorXd x = randn(3, rng);
    const double a = quadratic_form(G, cot_kernel(), tau, x);
    const double b = quadratic_form(Gc, cot_kernel(), tau, O.transpose() * x);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("near-zero branch agrees with the direct scalar formula") {
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  Eigen::VectorXd x(2);
  x << 1, 0;
  const double b = 1e-3;  // beta = 1e-6
  Eigen::VectorXd tau(1);
  tau << b;
  const double v = quadratic_form(H, cot_kernel(), tau, x);
  const double direct = b / std::tan(b);
  CHECK(v == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("concavity along rays of the cot form") {
  const StepTwoGroup G = builtin_group("corank1(4)");
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = randn(4, rng);
    const Eigen::VectorXd t = randn(1, rng);
    const Eigen::VectorXd dir = safe_tau(G, rng, 0.99);
    auto f = [&](double s) {
      return quadratic_form(G, cot_kernel(), s * dir, x) + 4.0 * t.dot(s * dir);
    };
    for (int i = 1; i < 20; ++i) {
      const double s = i / 20.0;
      const double second = f(s + 0.01) - 2 * f(s) + f(s - 0.01);
      CHECK(second <= 1e-10);
    }
  }
}
