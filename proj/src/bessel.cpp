#include "ccdist/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

namespace ccdist::bessel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// q_k scaled by exp(-log_scale); log_scale is 0 except on the hyperbolic
// branch where it equals sqrt(w).
struct ScaledQ {
  double mantissa;
  double log_scale;
  double value() const { return mantissa * std::exp(log_scale); }
};

double leading_coeff(int k) {
  // (1/2)^{k+1/2} / Gamma(k+3/2)
  return std::exp(-(k + 0.5) * std::log(2.0) - std::lgamma(k + 1.5));
}

// Power series in w. Entire of order 1/2; terms are positive for w > 0, and
// for b = sqrt(|w|) < k + 2 the alternating case loses at most a few digits.
double qk_series(int k, double w) {
  double term = leading_coeff(k);
  double sum = term;
  for (int n = 1; n < 600; ++n) {
    term *= (w / 4.0) / (n * (n + k + 0.5));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) && n > 4) break;
  }
  return sum;
}

// Upward recurrence q_{j+2} = (q_j - (2j+3) q_{j+1}) / w from closed-form
// q_0, q_1. Stable only for sqrt(|w|) >= k + 2, which is where it is used.
ScaledQ qk_recurrence(int k, double w) {
  const double b = std::sqrt(std::abs(w));
  const double c = std::sqrt(2.0 / kPi);
  double q0, q1, logsc;
  if (w >= 0.0) {
    // scaled by e^{-b}: sinh b = e^b (1 - e^{-2b})/2, cosh b = e^b (1 + e^{-2b})/2
    const double e2 = std::exp(-2.0 * b);
    q0 = c * (1.0 - e2) / (2.0 * b);
    q1 = c * ((b - 1.0) + (b + 1.0) * e2) / (2.0 * b * b * b);
    logsc = b;
  } else {
    q0 = c * std::sin(b) / b;
    q1 = c * (std::sin(b) - b * std::cos(b)) / (b * b * b);
    logsc = 0.0;
  }
  if (k == 0) return {q0, logsc};
  if (k == 1) return {q1, logsc};
  double a = q0, bq = q1;
  for (int j = 0; j + 2 <= k; ++j) {
    const double next = (a - (2 * j + 3) * bq) / w;
    a = bq;
    bq = next;
  }
  return {bq, logsc};
}

ScaledQ qk_scaled(int k, double w) {
  if (k < 0) throw Error("bessel order must be nonnegative");
  if (k > kMaxOrder + 4) throw Error("bessel order exceeds supported maximum");
  const double b = std::sqrt(std::abs(w));
  if (b < k + 2.0) return {qk_series(k, w), 0.0};
  return qk_recurrence(k, w);
}

double zero_lower_bound(int k, int l) { return ((k - 1) / 2.0 + l) * kPi; }
double zero_upper_bound(int k, int l) { return ((k + 1) / 2.0 + l) * kPi; }

// Safeguarded Newton for the zero of b -> q_k(-b^2) inside (lo, hi).
double refine_zero(int k, double lo, double hi) {
  auto g = [k](double b) { return qk_scaled(k, -b * b).mantissa; };
  double flo = g(lo);
  double b = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = g(b);
    if ((f > 0) == (flo > 0)) {
      lo = b;
      flo = f;
    } else {
      hi = b;
    }
    const double fp = -b * qk_scaled(k + 1, -b * b).mantissa;
    double bn = b - f / fp;
    if (!std::isfinite(bn) || bn <= lo || bn >= hi) bn = 0.5 * (lo + hi);
    if (std::abs(bn - b) <= 5e-16 * b) return bn;
    b = bn;
  }
  throw ConvergenceFailure("bessel zero refinement did not converge (k=" + std::to_string(k) +
                           ")");
}

// Zeros are built level by level: the zeros of J_{k+3/2} strictly interlace
// those of J_{k+1/2}, so (Z_{k,l}, Z_{k,l+1}) brackets Z_{k+1,l}.
class ZeroTable {
 public:
  static const ZeroTable& instance() {
    static ZeroTable table;
    return table;
  }

  double get(int k, int l) const {
    if (k < 0 || l < 1) throw Error("bessel zero indices out of range (k >= 0, l >= 1)");
    if (k > kMaxOrder) throw Error("bessel zero order exceeds supported maximum");
    if (l <= static_cast<int>(rows_[k].size())) return rows_[k][l - 1];
    if (k == 0) return l * kPi;
    // Rare uncached case: the interlacing bound interval has width pi and
    // contains exactly one zero, so bracket there directly.
    double lo = zero_lower_bound(k, l), hi = zero_upper_bound(k, l);
    auto g = [k](double b) { return qk_scaled(k, -b * b).mantissa; };
    while (g(lo) * g(hi) > 0) {
      lo -= 1e-6;
      hi += 1e-6;
    }
    return refine_zero(k, lo, hi);
  }

 private:
  ZeroTable() {
    const int L = 128;
    rows_.resize(kMaxOrder + 1);
    rows_[0].resize(L + kMaxOrder + 1);
    for (int l = 1; l <= L + kMaxOrder; ++l) rows_[0][l - 1] = l * kPi;
    for (int k = 1; k <= kMaxOrder; ++k) {
      const int count = L + kMaxOrder - k;
      rows_[k].resize(count);
      for (int l = 1; l <= count; ++l)
        rows_[k][l - 1] = refine_zero(k, rows_[k - 1][l - 1], rows_[k - 1][l]);
    }
  }

  std::vector<std::vector<double>> rows_;
};

void check_rk_domain(int k, double w) {
  const double z1 = zero(k, 1);
  if (w <= -z1 * z1)
    throw DomainViolation("rk: w <= -zero(k,1)^2 (first pole of the even extension)");
}

}  // namespace

double zero(int k, int l) { return ZeroTable::instance().get(k, l); }

double qk(int k, double w) { return qk_scaled(k, w).value(); }

double log_qk(int k, double w) {
  if (w < 0.0) throw DomainViolation("log_qk requires w >= 0");
  const ScaledQ s = qk_scaled(k, w);
  return std::log(s.mantissa) + s.log_scale;
}

double rk(int k, double w) {
  check_rk_domain(k, w);
  const ScaledQ a = qk_scaled(k + 1, w);
  const ScaledQ b = qk_scaled(k, w);
  return w * (a.mantissa / b.mantissa) * std::exp(a.log_scale - b.log_scale);
}

RkDerivs rk_derivs(int k, double w) {
  check_rk_domain(k, w);
  const ScaledQ q0 = qk_scaled(k, w);
  const ScaledQ q1 = qk_scaled(k + 1, w);
  const ScaledQ q2 = qk_scaled(k + 2, w);
  const ScaledQ q3 = qk_scaled(k + 3, w);
  const double r1 = (q1.mantissa / q0.mantissa) * std::exp(q1.log_scale - q0.log_scale);
  const double r2 = (q2.mantissa / q0.mantissa) * std::exp(q2.log_scale - q0.log_scale);
  const double r3 = (q3.mantissa / q0.mantissa) * std::exp(q3.log_scale - q0.log_scale);
  RkDerivs out;
  out.value = w * r1;
  const double v2 = r2 - r1 * r1;  // 2 d(rho1)/dw
  out.d1 = r1 + 0.5 * w * v2;
  out.d2 = v2 + 0.25 * w * (r3 - r1 * r2) - 0.5 * w * r1 * v2;
  return out;
}

SeriesResult rk_series(int k, double w, int L) {
  check_rk_domain(k, w);
  if (L < 1) throw Error("rk_series: L must be >= 1");
  SeriesResult out{0.0, 0.0, 0.0};
  for (int l = 1; l <= L; ++l) {
    const double z = zero(k, l);
    out.value += 2.0 * w / (z * z + w);
  }
  // Tail bound from the lower zero bound Z_{k,l} >= ((k-1)/2 + l) pi,
  // using sum_{j > a} j^{-2} < 1/a.
  const double a = (k - 1) / 2.0 + L;
  out.tail_bound = 2.0 * std::abs(w) / (kPi * kPi * a);
  // Asymptotic tail estimate with McMahon zeros (l + k/2) pi plus the
  // integral remainder with midpoint offset.
  double corr = 0.0;
  const int M = 200000;
  for (int l = L + 1; l <= L + M; ++l) {
    const double z = (l + 0.5 * k) * kPi;
    corr += 2.0 * w / (z * z + w);
  }
  corr += 2.0 * w / (kPi * kPi * (L + M + 0.5 * k + 0.5));
  out.corrected = out.value + corr;
  return out;
}

}  // namespace ccdist::bessel
