// ccdist -- even analytic matrix functions of U(tau) through the real
// symmetric eigenproblem for S(tau) = Ut(tau)^T Ut(tau).
//
// Every kernel used here is an even function of z, so it only sees z^2,
// and the spectrum of S(tau) (the squared singular values beta_i of
// Ut(tau)) determines everything. Kernels are expressed directly in beta.
#pragma once

#include <Eigen/Core>
#include <memory>

#include "ccdist/group.hpp"

namespace ccdist {

struct SpectralData {
  Eigen::MatrixXd basis;  // orthogonal; columns are eigenvectors of S(tau)
  Eigen::VectorXd beta;   // eigenvalues of S(tau), clamped to >= 0, ascending
  Eigen::VectorXd tau;

  double max_beta() const { return beta.size() ? beta[beta.size() - 1] : 0.0; }
};

SpectralData spectral(const StepTwoGroup& G, const Eigen::VectorXd& tau);

// Scalar kernel in beta = z^2 coordinates with two derivatives.
class EvenKernel {
 public:
  virtual ~EvenKernel() = default;
  virtual double value(double beta) const = 0;
  virtual double d1(double beta) const = 0;
  virtual double d2(double beta) const = 0;
  // Supremum of the admissible beta range (beta >= 0 always); +inf if entire.
  virtual double domain_sup() const = 0;
  virtual const char* name() const = 0;
};

// z cot z               (domain beta < pi^2)
const EvenKernel& cot_kernel();
// z / sin z             (domain beta < pi^2)
const EvenKernel& inv_sinc_kernel();
// sin z / z             (entire)
const EvenKernel& sinc_kernel();
// z / sinh z            (entire in beta >= 0)
const EvenKernel& sinhc_det_kernel();
// R_k(z) at z^2 = -beta (domain beta < zero(k,1)^2)
const EvenKernel& rk_kernel(int k);
// Q_k(z) at z^2 = +beta (entire in beta >= 0)
const EvenKernel& qk_kernel(int k);

// basis * diag(f(beta_i)) * basis^T
Eigen::MatrixXd apply_even(const EvenKernel& f, const SpectralData& sd);

double quadratic_form(const StepTwoGroup& G, const EvenKernel& f, const Eigen::VectorXd& tau,
                      const Eigen::VectorXd& x);

struct QuadFormDerivs {
  double value = 0.0;
  Eigen::VectorXd grad;   // d/dtau_j of x^T f(S(tau)) x
  Eigen::MatrixXd hess;   // second derivatives
  bool near_boundary = false;
};

// Value, gradient and Hessian in tau of x^T f(S(tau)) x, by first and second
// divided differences of the kernel across eigenvalue pairs.
QuadFormDerivs quad_form_derivs(const StepTwoGroup& G, const EvenKernel& f,
                                const SpectralData& sd, const Eigen::VectorXd& x,
                                bool want_hessian = true);

Eigen::VectorXd grad_quadratic_form(const StepTwoGroup& G, const EvenKernel& f,
                                    const Eigen::VectorXd& tau, const Eigen::VectorXd& x);

Eigen::MatrixXd hessian_quadratic_form(const StepTwoGroup& G, const EvenKernel& f,
                                       const Eigen::VectorXd& tau, const Eigen::VectorXd& x);

// (d/dtau_j) f(S(tau)) applied to a vector v.
Eigen::VectorXd apply_even_derivative(const StepTwoGroup& G, const EvenKernel& f,
                                      const SpectralData& sd, int j, const Eigen::VectorXd& v);

}  // namespace ccdist
