#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccdist/bessel.hpp"

using namespace ccdist;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("zeros of the sine order are multiples of pi") {
  CHECK(bessel::zero(0, 3) == doctest::Approx(3 * kPi).epsilon(1e-14));
  CHECK(bessel::zero(0, 64) == doctest::Approx(64 * kPi).epsilon(1e-14));
}

TEST_CASE("first zero of order 3/2 against the tan z = z oracle") {
  double lo = kPi + 1e-9, hi = 1.5 * kPi - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::tan(mid) - mid < 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(bessel::zero(1, 1) - 0.5 * (lo + hi)) <= 1e-12);
  CHECK(bessel::zero(1, 1) == doctest::Approx(4.493409457909064).epsilon(1e-12));
}

TEST_CASE("interlacing of consecutive orders") {
  for (int k = 0; k <= 10; ++k)
    for (int l = 1; l <= 32; ++l) {
      CHECK(bessel::zero(k, l) < bessel::zero(k + 1, l));
      CHECK(bessel::zero(k + 1, l) < bessel::zero(k, l + 1));
    }
}

TEST_CASE("qk frozen values") {
  CHECK(bessel::qk(0, 0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
  CHECK(bessel::qk(0, 1.0) ==
        doctest::Approx(std::sqrt(2.0 / kPi) * std::sinh(1.0)).epsilon(1e-14));
  // The even extension vanishes at the first pole location.
  const double z = kPi * (1.0 - 1e-9);
  CHECK(std::abs(bessel::qk(0, -z * z)) <= 1e-8);
}

TEST_CASE("rk frozen values and limits") {
  CHECK(bessel::rk(0, 0.0) == 0.0);
  CHECK(bessel::rk(0, 1.0) == doctest::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-13));
  CHECK(bessel::rk(0, -1.0) == doctest::Approx(1.0 / std::tan(1.0) - 1.0).epsilon(1e-13));
  CHECK_THROWS_AS(bessel::rk(0, -kPi * kPi), DomainViolation);
  // Blows down near the pole.
  CHECK(bessel::rk(0, -kPi * kPi * (1 - 1e-6)) < -1e5);
}

TEST_CASE("rk is strictly increasing in w") {
  for (int k : {0, 1, 3}) {
    const double z1 = bessel::zero(k, 1);
    double prev = -1e308;
    for (int i = 0; i <= 200; ++i) {
      const double w = -z1 * z1 * 0.98 + i * (50.0 + z1 * z1 * 0.98) / 200.0;
      const double v = bessel::rk(k, w);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("recursion identity across evaluation branches") {
  std::mt19937_64 rng(123);
  for (int k : {0, 2, 5, 8}) {
    const double z1 = bessel::zero(k, 1);
    std::uniform_real_distribution<double> W(-z1 * z1 + 0.1, 50.0);
    for (int i = 0; i < 100; ++i) {
      const double w = W(rng);
      const double lhs = bessel::qk(k, w);
      const double rhs = (2 * k + 3) * bessel::qk(k + 1, w) + w * bessel::qk(k + 2, w);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
    }
  }
}

TEST_CASE("positivity of qk above the first pole") {
  std::mt19937_64 rng(321);
  for (int k : {0, 1, 4}) {
    const double z1 = bessel::zero(k, 1);
    std::uniform_real_distribution<double> W(-z1 * z1 * 0.999, 100.0);
    for (int i = 0; i < 200; ++i) CHECK(bessel::qk(k, W(rng)) > 0.0);
  }
}

TEST_CASE("derivative identity dq/dw = q_{k+1}/2 by central differences") {
  for (int k : {0, 1, 3}) {
    for (double w : {-3.0, -0.5, 0.7, 9.0}) {
      const double h = 1e-6;
      const double fd = (bessel::qk(k, w + h) - bessel::qk(k, w - h)) / (2 * h);
      CHECK(fd == doctest::Approx(0.5 * bessel::qk(k + 1, w)).epsilon(1e-7));
    }
  }
}

TEST_CASE("rk_derivs matches finite differences") {
  for (int k : {0, 1, 2}) {
    for (double w : {-4.0, -0.3, 0.0, 2.5, 20.0}) {
      const double h = 1e-5;
      const auto d = bessel::rk_derivs(k, w);
      const double fd1 = (bessel::rk(k, w + h) - bessel::rk(k, w - h)) / (2 * h);
      const double fd2 =
          (bessel::rk(k, w + h) - 2 * bessel::rk(k, w) + bessel::rk(k, w - h)) / (h * h);
      CHECK(d.d1 == doctest::Approx(fd1).epsilon(1e-7));
      CHECK(d.d2 == doctest::Approx(fd2).epsilon(1e-4));
    }
  }
}

TEST_CASE("series form converges to the closed form") {
  const auto s = bessel::rk_series(0, 1.0, 10000);
  const double closed = bessel::rk(0, 1.0);
  CHECK(std::abs(s.value - closed) <= s.tail_bound);
  CHECK(std::abs(s.corrected - closed) <= 1e-8);
  const auto s2 = bessel::rk_series(1, 4.0, 10000);
  CHECK(std::abs(s2.value - bessel::rk(1, 4.0)) <= s2.tail_bound);
  const auto s0 = bessel::rk_series(2, 0.0, 5);
  CHECK(s0.value == 0.0);
}

TEST_CASE("log_qk agrees with the direct value and scales to huge arguments") {
  for (double w : {0.0, 1.0, 40.0, 900.0}) {
    CHECK(bessel::log_qk(0, w) == doctest::Approx(std::log(bessel::qk(0, w))).epsilon(1e-12));
  }
  // Far beyond direct overflow: log q_0(w) ~ sqrt(w) - log(2 sqrt(w)) + log sqrt(2/pi)
  const double w = 4.0e6;
  const double b = std::sqrt(w);
  const double expect = b - std::log(2.0 * b) + 0.5 * std::log(2.0 / kPi);
  CHECK(bessel::log_qk(0, w) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(bessel::log_qk(0, -1.0), DomainViolation);
}

TEST_CASE("orders beyond the cap are rejected") {
  CHECK_THROWS_AS(bessel::zero(64, 1), Error);
  CHECK_THROWS_AS(bessel::qk(80, 1.0), Error);
}
