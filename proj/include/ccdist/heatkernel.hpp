// ccdist -- heat kernel evaluation by oscillatory quadrature, the lifted
// kernels P_{k,h}, their recursion relation, small-time leading terms, and
// distance estimation from the small-time logarithmic limit.
//
// Normalization: p_h is the convolution kernel of e^{h Delta} for the
// sub-Laplacian Delta = sum_l X_l^2. The prefactor constant is
// (4 pi)^{-q/2} (2 pi)^{-m}, pinned on heisenberg(1) at the identity where
// the integral has the closed value pi^2/2 and p_1(o) = 1/16.
#pragma once

#include <optional>
#include <vector>

#include "ccdist/group.hpp"
#include "ccdist/optimize.hpp"

namespace ccdist {

struct QuadConfig {
  int order = 16;           // Gauss-Legendre nodes per panel per axis
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;   // absolute floor for the convergence test
  double lambda_cap = 200.0;
  int max_doublings = 10;
  int hermite_order = 24;   // for the recursion-relation check
};

struct HeatKernelEstimate {
  double value = 0.0;      // may underflow for very small h; log_value holds
  double log_value = 0.0;  // log of the (positive) kernel value
  double h = 0.0;
  double quad_error = 0.0;      // relative error estimate
  double imag_residual = 0.0;   // |Im| / |Re| of the evaluated integral
  double truncation_radius = 0.0;
  bool converged = false;
};

double heat_constant(int q, int m);        // (4 pi)^{-q/2} (2 pi)^{-m}
double heat_constant_tilde(int q, int m);  // heat_constant * (2/pi)^{q/4}

// p_h(g). For m = 1 the integration contour is shifted to pass through the
// concave maximizer of the reference function, which removes the oscillatory
// cancellation that defeats real-axis quadrature at small h; for m >= 2 the
// real axis is used and severe cancellation is reported as non-convergence.
HeatKernelEstimate heat_kernel(const StepTwoGroup& G, const GroupPoint& g, double h,
                               const QuadConfig& quad);

// P_{k,h}(X, T), real-axis quadrature.
HeatKernelEstimate p_k_h(const StepTwoGroup& G, int k, const Eigen::VectorXd& X,
                         const Eigen::VectorXd& T, double h, const QuadConfig& quad);

struct RelationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_discrepancy = 0.0;
  bool converged = false;
};

// Checks P_{k,h}(X,T) = (2 pi)^{-q/2} Int e^{-(2k+3)|s|^2/2h} P_{k+1,h}(s, T + <Ux,s>) ds
// by Gauss-Hermite in s with the inner kernel evaluated per node.
RelationReport verify_relation_pk(const StepTwoGroup& G, int k, const Eigen::VectorXd& X,
                                  const Eigen::VectorXd& T, double h, const QuadConfig& quad);

struct VaradhanResult {
  std::vector<double> h_values;
  std::vector<double> estimates;  // -4 h log p_h
  double extrapolated = 0.0;      // fit est = d2 + a h log(1/h) + b h
  bool monotone = false;          // increasing as h decreases
  bool all_converged = false;
};

VaradhanResult varadhan_estimate(const StepTwoGroup& G, const GroupPoint& g,
                                 const std::vector<double>& h_list, const QuadConfig& quad);

struct AsymptoticTerm {
  double value = 0.0;
  double log_value = 0.0;
  Eigen::VectorXd theta;
};

// Small-time leading term: the k = 0 form approximates p_h(g); for k >= 1 the
// level-k form approximates P_{k,h}(X,T) with (X,T) = (x,t). Throws NotInM
// when no interior nondegenerate maximizer exists.
AsymptoticTerm asymptotic_leading_term(const StepTwoGroup& G, const GroupPoint& g, int k,
                                       double h, const SolverConfig& cfg);

}  // namespace ccdist
