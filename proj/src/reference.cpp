#include "ccdist/reference.hpp"

#include <cmath>

#include "ccdist/bessel.hpp"

namespace ccdist {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_segment(const StepTwoGroup& G, const SegmentVector& s, int k) {
  if (s.k != k || static_cast<int>(s.s.size()) != k)
    throw DimensionMismatch("segment vector level mismatch");
  for (const auto& sj : s.s)
    if (sj.size() != G.q) throw DimensionMismatch("segment vector entry dimension != q");
}

void reject_outside(double margin, int k) {
  if (margin < 1e-10 * omega_radius(k))
    throw DomainViolation("tau outside the level-" + std::to_string(k) + " reference set");
}

}  // namespace

SegmentVector SegmentVector::zeros(int k, int q) {
  SegmentVector s;
  s.k = k;
  s.s.assign(k, Eigen::VectorXd::Zero(q));
  return s;
}

Eigen::VectorXd SegmentVector::flatten() const {
  const int q = k > 0 ? static_cast<int>(s[0].size()) : 0;
  Eigen::VectorXd v(k * q);
  for (int j = 0; j < k; ++j) v.segment(j * q, q) = s[j];
  return v;
}

SegmentVector SegmentVector::unflatten(const Eigen::VectorXd& v, int k, int q) {
  if (v.size() != k * q) throw DimensionMismatch("unflatten: wrong size");
  SegmentVector s;
  s.k = k;
  for (int j = 0; j < k; ++j) s.s.push_back(v.segment(j * q, q));
  return s;
}

double omega_radius(int k) { return bessel::zero(k, 1); }

double omega_margin(const StepTwoGroup& G, const Eigen::VectorXd& tau, int k) {
  const SpectralData sd = spectral(G, tau);
  return omega_radius(k) - std::sqrt(sd.max_beta());
}

double phi(const StepTwoGroup& G, const GroupPoint& g, const Eigen::VectorXd& tau) {
  reject_outside(omega_margin(G, tau, 0), 0);
  return quadratic_form(G, cot_kernel(), tau, g.x) + 4.0 * g.t.dot(tau);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> f_k_map(const StepTwoGroup& G,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& t,
                                                    const SegmentVector& s) {
  const int k = s.k;
  if (k < 1) throw DimensionMismatch("f_k_map requires level k >= 1");
  check_segment(G, s, k);
  if (x.size() != G.q || t.size() != G.m) throw DimensionMismatch("f_k_map: point dimensions");
  Eigen::VectorXd T = t + G.pairing(x, s.s[0]) / kSqrt2;
  for (int j = 1; j < k; ++j) T += G.pairing(s.s[j - 1], s.s[j]);
  return {s.s[k - 1], T};
}

double phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X, const Eigen::VectorXd& T,
             const Eigen::VectorXd& tau, int k) {
  reject_outside(omega_margin(G, tau, k), k);
  return 2.0 * quadratic_form(G, rk_kernel(k), tau, X) + 4.0 * T.dot(tau);
}

Eigen::VectorXd ReferenceEval::full_gradient(int q, int m) const {
  const int k = static_cast<int>(grad_s.size());
  Eigen::VectorXd g(k * q + m);
  for (int j = 0; j < k; ++j) g.segment(j * q, q) = grad_s[j];
  g.tail(m) = grad_tau;
  return g;
}

ReferenceEval eval_phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X,
                         const Eigen::VectorXd& T, const Eigen::VectorXd& tau, int k,
                         EvalMode mode) {
  const SpectralData sd = spectral(G, tau);
  ReferenceEval out;
  out.boundary_margin = omega_radius(k) - std::sqrt(sd.max_beta());
  reject_outside(out.boundary_margin, k);

  const EvenKernel& ker = rk_kernel(k);
  if (mode == EvalMode::ValueOnly) {
    const Eigen::VectorXd xt = sd.basis.transpose() * X;
    double qf = 0.0;
    for (int i = 0; i < G.q; ++i) qf += ker.value(sd.beta[i]) * xt[i] * xt[i];
    out.value = 2.0 * qf + 4.0 * T.dot(tau);
    return out;
  }
  QuadFormDerivs d = quad_form_derivs(G, ker, sd, X, true);
  out.value = 2.0 * d.value + 4.0 * T.dot(tau);
  out.grad_tau = 2.0 * d.grad + 4.0 * T;
  out.hess_tau = 2.0 * d.hess;
  out.near_boundary = d.near_boundary;
  return out;
}

ReferenceEval phi_k_star(const StepTwoGroup& G, const GroupPoint& g, const SegmentVector& s,
                         const Eigen::VectorXd& tau, int k, EvalMode mode) {
  check_segment(G, s, k);
  const int q = G.q, m = G.m;

  if (k == 0) {
    const SpectralData sd = spectral(G, tau);
    ReferenceEval out;
    out.boundary_margin = omega_radius(0) - std::sqrt(sd.max_beta());
    reject_outside(out.boundary_margin, 0);
    if (mode == EvalMode::ValueOnly) {
      const Eigen::VectorXd xt = sd.basis.transpose() * g.x;
      double qf = 0.0;
      for (int i = 0; i < q; ++i) qf += cot_kernel().value(sd.beta[i]) * xt[i] * xt[i];
      out.value = qf + 4.0 * g.t.dot(tau);
      return out;
    }
    QuadFormDerivs d = quad_form_derivs(G, cot_kernel(), sd, g.x, true);
    out.value = d.value + 4.0 * g.t.dot(tau);
    out.grad_tau = d.grad + 4.0 * g.t;
    out.hess_tau = d.hess;
    out.hess = d.hess;
    out.near_boundary = d.near_boundary;
    return out;
  }

  const SpectralData sd = spectral(G, tau);
  ReferenceEval out;
  out.boundary_margin = omega_radius(k) - std::sqrt(sd.max_beta());
  reject_outside(out.boundary_margin, k);

  auto [X, T] = f_k_map(G, g.x, g.t, s);
  const Eigen::MatrixXd Ut = G.u_tilde(tau);
  const EvenKernel& ker = rk_kernel(k);

  double quad_s = 0.0;
  for (int j = 0; j < k; ++j) quad_s += 2.0 * (2 * (j + 1) + 1) * s.s[j].squaredNorm();

  if (mode == EvalMode::ValueOnly) {
    const Eigen::VectorXd xt = sd.basis.transpose() * X;
    double qf = 0.0;
    for (int i = 0; i < q; ++i) qf += ker.value(sd.beta[i]) * xt[i] * xt[i];
    out.value = g.x.squaredNorm() + quad_s + 2.0 * qf + 4.0 * T.dot(tau);
    return out;
  }

  QuadFormDerivs d = quad_form_derivs(G, ker, sd, X, true);
  out.value = g.x.squaredNorm() + quad_s + 2.0 * d.value + 4.0 * T.dot(tau);
  out.near_boundary = d.near_boundary;

  const Eigen::MatrixXd A = apply_even(ker, sd);

  // tau gradient: 4 t_j + bilinear sweep terms + 2 d/dtau <A X, X>.
  out.grad_tau = Eigen::VectorXd(m);
  for (int j = 0; j < m; ++j) {
    double v = 4.0 * g.t[j] + 4.0 / kSqrt2 * s.s[0].dot(G.U[j].transpose() * g.x);
    for (int a = 1; a < k; ++a) v += 4.0 * s.s[a].dot(G.U[j].transpose() * s.s[a - 1]);
    out.grad_tau[j] = v + 2.0 * d.grad[j];
  }
  out.hess_tau = 2.0 * d.hess;

  // s gradients: quadratic diagonal + chain couplings + the R_k term on s_k.
  out.grad_s.assign(k, Eigen::VectorXd::Zero(q));
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd gj = 4.0 * (2 * (j + 1) + 1) * s.s[j];
    if (j == k - 1) gj += 4.0 * A * s.s[k - 1];
    if (j == 0)
      gj += (4.0 / kSqrt2) * Ut.transpose() * g.x;
    else
      gj += 4.0 * Ut.transpose() * s.s[j - 1];
    if (j + 1 < k) gj += 4.0 * Ut * s.s[j + 1];
    out.grad_s[j] = gj;
  }

  if (mode != EvalMode::Full) return out;

  const int dim = k * q + m;
  out.hess = Eigen::MatrixXd::Zero(dim, dim);
  // s-s blocks
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd blk = 4.0 * (2 * (j + 1) + 1) * Eigen::MatrixXd::Identity(q, q);
    if (j == k - 1) blk += 4.0 * A;
    out.hess.block(j * q, j * q, q, q) = blk;
    if (j + 1 < k) {
      out.hess.block(j * q, (j + 1) * q, q, q) = 4.0 * Ut;
      out.hess.block((j + 1) * q, j * q, q, q) = 4.0 * Ut.transpose();
    }
  }
  // s-tau blocks
  for (int a = 0; a < k; ++a)
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd col = Eigen::VectorXd::Zero(q);
      if (a == k - 1) col += 4.0 * apply_even_derivative(G, ker, sd, j, s.s[k - 1]);
      if (a == 0)
        col += (4.0 / kSqrt2) * G.U[j].transpose() * g.x;
      else
        col += 4.0 * G.U[j].transpose() * s.s[a - 1];
      if (a + 1 < k) col += 4.0 * G.U[j] * s.s[a + 1];
      out.hess.block(a * q, k * q + j, q, 1) = col;
      out.hess.block(k * q + j, a * q, 1, q) = col.transpose();
    }
  // tau-tau block
  out.hess.block(k * q, k * q, m, m) = out.hess_tau;
  return out;
}

}  // namespace ccdist
