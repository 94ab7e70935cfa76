// ccdist -- half-integer-order Bessel machinery.
//
// Everything is evaluated in the even-argument coordinate w = z^2: qk(k, w)
// is the entire function z^{-(k+1/2)} I_{k+1/2}(z) expressed in w, positive
// for w > -zero(k,1)^2, and rk(k, w) = w * qk(k+1, w) / qk(k, w).
#pragma once

#include <utility>

#include "ccdist/errors.hpp"

namespace ccdist::bessel {

inline constexpr int kMaxOrder = 36;  // orders above this error out

// l-th positive zero of J_{k+1/2} (l >= 1). Cached for k <= kMaxOrder.
double zero(int k, int l);

// q_k(w): value of z^{-(k+1/2)} I_{k+1/2}(z) at z^2 = w (any real w).
double qk(int k, double w);

// log q_k(w) for w >= 0, stable for large w.
double log_qk(int k, double w);

// r_k(w) = w q_{k+1}(w)/q_k(w); increasing, r_k(0) = 0; domain w > -zero(k,1)^2.
double rk(int k, double w);

struct RkDerivs {
  double value;
  double d1;
  double d2;
};

// r_k with first and second w-derivatives (via dq_k/dw = q_{k+1}/2).
RkDerivs rk_derivs(int k, double w);

struct SeriesResult {
  double value;       // truncated partial-fraction sum
  double tail_bound;  // rigorous bound on the dropped tail
  double corrected;   // value + asymptotic tail estimate
};

// Truncated partial-fraction form of r_k: 2 sum_{l<=L} w/(zero(k,l)^2 + w).
SeriesResult rk_series(int k, double w, int L);

}  // namespace ccdist::bessel
