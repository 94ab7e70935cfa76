#include "ccdist/matfun.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

#include "ccdist/bessel.hpp"

namespace ccdist {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// All kernels reduce to the q-family: q'_k(w) = q_{k+1}(w)/2 makes the
// derivatives exact.

class CotKernel final : public EvenKernel {
 public:
  double value(double beta) const override { return 1.0 + bessel::rk(0, -beta); }
  double d1(double beta) const override { return -bessel::rk_derivs(0, -beta).d1; }
  double d2(double beta) const override { return bessel::rk_derivs(0, -beta).d2; }
  double domain_sup() const override { return kPi * kPi; }
  const char* name() const override { return "cot"; }
};

class RkKernel final : public EvenKernel {
 public:
  explicit RkKernel(int k) : k_(k), sup_(bessel::zero(k, 1) * bessel::zero(k, 1)) {}
  double value(double beta) const override { return bessel::rk(k_, -beta); }
  double d1(double beta) const override { return -bessel::rk_derivs(k_, -beta).d1; }
  double d2(double beta) const override { return bessel::rk_derivs(k_, -beta).d2; }
  double domain_sup() const override { return sup_; }
  const char* name() const override { return "rk"; }

 private:
  int k_;
  double sup_;
};

class SincKernel final : public EvenKernel {
 public:
  double value(double beta) const override { return kC * bessel::qk(0, -beta); }
  double d1(double beta) const override { return -0.5 * kC * bessel::qk(1, -beta); }
  double d2(double beta) const override { return 0.25 * kC * bessel::qk(2, -beta); }
  double domain_sup() const override { return kInf; }
  const char* name() const override { return "sinc"; }

  static constexpr double kC = 1.2533141373155003;  // sqrt(pi/2)
};

class InvSincKernel final : public EvenKernel {
 public:
  double value(double beta) const override { return 1.0 / sinc_.value(beta); }
  double d1(double beta) const override {
    const double s = sinc_.value(beta);
    return -sinc_.d1(beta) / (s * s);
  }
  double d2(double beta) const override {
    const double s = sinc_.value(beta), s1 = sinc_.d1(beta), s2 = sinc_.d2(beta);
    return (2.0 * s1 * s1 - s * s2) / (s * s * s);
  }
  double domain_sup() const override { return kPi * kPi; }
  const char* name() const override { return "inv_sinc"; }

 private:
  SincKernel sinc_;
};

class SinhcDetKernel final : public EvenKernel {
 public:
  double value(double beta) const override { return 1.0 / (SincKernel::kC * bessel::qk(0, beta)); }
  double d1(double beta) const override {
    const double s = SincKernel::kC * bessel::qk(0, beta);
    const double s1 = 0.5 * SincKernel::kC * bessel::qk(1, beta);
    return -s1 / (s * s);
  }
  double d2(double beta) const override {
    const double s = SincKernel::kC * bessel::qk(0, beta);
    const double s1 = 0.5 * SincKernel::kC * bessel::qk(1, beta);
    const double s2 = 0.25 * SincKernel::kC * bessel::qk(2, beta);
    return (2.0 * s1 * s1 - s * s2) / (s * s * s);
  }
  double domain_sup() const override { return kInf; }
  const char* name() const override { return "sinhc_det"; }
};

class QkKernel final : public EvenKernel {
 public:
  explicit QkKernel(int k) : k_(k) {}
  double value(double beta) const override { return bessel::qk(k_, beta); }
  double d1(double beta) const override { return 0.5 * bessel::qk(k_ + 1, beta); }
  double d2(double beta) const override { return 0.25 * bessel::qk(k_ + 2, beta); }
  double domain_sup() const override { return kInf; }
  const char* name() const override { return "qk"; }

 private:
  int k_;
};

void check_domain(const EvenKernel& f, const SpectralData& sd) {
  const double sup = f.domain_sup();
  if (sup == kInf) return;
  const double margin = 1e-12 * std::max(1.0, sup);
  for (int i = 0; i < sd.beta.size(); ++i)
    if (sd.beta[i] >= sup - margin)
      throw DomainViolation(std::string(f.name()) + ": eigenvalue " + std::to_string(i) +
                                " outside kernel domain",
                            i);
}

// First divided difference; switches to the derivative below a gap where
// cancellation would dominate the quotient.
double ddiff1(const EvenKernel& f, double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= 1e-6 * scale) return f.d1(0.5 * (a + b));
  return (f.value(a) - f.value(b)) / (a - b);
}

// Second divided difference, symmetric in (a, b, c).
double ddiff2(const EvenKernel& f, double a, double b, double c) {
  // Order so the outer pair is the farthest apart.
  double lo = std::min({a, b, c}), hi = std::max({a, b, c});
  const double mid = a + b + c - lo - hi;
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo <= 1e-4 * scale) return 0.5 * f.d2((a + b + c) / 3.0);
  return (ddiff1(f, hi, mid) - ddiff1(f, mid, lo)) / (hi - lo);
}

}  // namespace

const EvenKernel& cot_kernel() {
  static const CotKernel k;
  return k;
}
const EvenKernel& inv_sinc_kernel() {
  static const InvSincKernel k;
  return k;
}
const EvenKernel& sinc_kernel() {
  static const SincKernel k;
  return k;
}
const EvenKernel& sinhc_det_kernel() {
  static const SinhcDetKernel k;
  return k;
}
const EvenKernel& rk_kernel(int k) {
  static std::vector<std::unique_ptr<RkKernel>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (k < 0) throw Error("rk_kernel: negative level");
  while (static_cast<int>(cache.size()) <= k)
    cache.push_back(std::make_unique<RkKernel>(static_cast<int>(cache.size())));
  return *cache[k];
}
const EvenKernel& qk_kernel(int k) {
  static std::vector<std::unique_ptr<QkKernel>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (k < 0) throw Error("qk_kernel: negative level");
  while (static_cast<int>(cache.size()) <= k)
    cache.push_back(std::make_unique<QkKernel>(static_cast<int>(cache.size())));
  return *cache[k];
}

SpectralData spectral(const StepTwoGroup& G, const Eigen::VectorXd& tau) {
  if (tau.size() != G.m) throw DimensionMismatch("spectral: tau dimension != m");
  const Eigen::MatrixXd Ut = G.u_tilde(tau);
  const Eigen::MatrixXd S = Ut.transpose() * Ut;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw EigenFailure("spectral: eigensolver did not converge");
  SpectralData sd;
  sd.basis = es.eigenvectors();
  sd.beta = es.eigenvalues();
  for (int i = 0; i < sd.beta.size(); ++i) {
    if (sd.beta[i] < -1e-10 * std::max(1.0, S.norm()))
      throw EigenFailure("spectral: significantly negative eigenvalue of S");
    if (sd.beta[i] < 0.0) sd.beta[i] = 0.0;
  }
  sd.tau = tau;
  return sd;
}

Eigen::MatrixXd apply_even(const EvenKernel& f, const SpectralData& sd) {
  check_domain(f, sd);
  Eigen::VectorXd fv(sd.beta.size());
  for (int i = 0; i < sd.beta.size(); ++i) fv[i] = f.value(sd.beta[i]);
  return sd.basis * fv.asDiagonal() * sd.basis.transpose();
}

double quadratic_form(const StepTwoGroup& G, const EvenKernel& f, const Eigen::VectorXd& tau,
                      const Eigen::VectorXd& x) {
  if (x.size() != G.q) throw DimensionMismatch("quadratic_form: x dimension != q");
  const SpectralData sd = spectral(G, tau);
  check_domain(f, sd);
  const Eigen::VectorXd xt = sd.basis.transpose() * x;
  double out = 0.0;
  for (int i = 0; i < sd.beta.size(); ++i) out += f.value(sd.beta[i]) * xt[i] * xt[i];
  return out;
}

QuadFormDerivs quad_form_derivs(const StepTwoGroup& G, const EvenKernel& f,
                                const SpectralData& sd, const Eigen::VectorXd& x,
                                bool want_hessian) {
  if (x.size() != G.q) throw DimensionMismatch("quad_form_derivs: x dimension != q");
  check_domain(f, sd);
  const int q = G.q, m = G.m;
  QuadFormDerivs out;
  out.grad = Eigen::VectorXd::Zero(m);
  if (want_hessian) out.hess = Eigen::MatrixXd::Zero(m, m);

  const double sup = f.domain_sup();
  if (sup != kInf) {
    const double z2 = sup;
    out.near_boundary = (z2 - sd.max_beta()) < 1e-8 * z2;
  }

  const Eigen::VectorXd xt = sd.basis.transpose() * x;
  for (int i = 0; i < q; ++i) out.value += f.value(sd.beta[i]) * xt[i] * xt[i];

  const Eigen::MatrixXd Ut = G.u_tilde(sd.tau);
  // Directional derivatives of S(tau) along e_j, rotated to the eigenbasis.
  std::vector<Eigen::MatrixXd> Dt(m);
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXd Dj = G.U[j].transpose() * Ut + Ut.transpose() * G.U[j];
    Dt[j] = sd.basis.transpose() * Dj * sd.basis;
  }

  Eigen::MatrixXd H1(q, q);
  for (int p = 0; p < q; ++p)
    for (int r = p; r < q; ++r) {
      H1(p, r) = ddiff1(f, sd.beta[p], sd.beta[r]);
      H1(r, p) = H1(p, r);
    }

  for (int j = 0; j < m; ++j) {
    double g = 0.0;
    for (int p = 0; p < q; ++p)
      for (int r = 0; r < q; ++r) g += xt[p] * xt[r] * H1(p, r) * Dt[j](p, r);
    out.grad[j] = g;
  }

  if (!want_hessian) return out;

  // Second Frechet derivative: the curvature of S (E_{jl} constant since S is
  // quadratic in tau) plus the second divided-difference term.
  for (int j = 0; j < m; ++j)
    for (int l = j; l < m; ++l) {
      const Eigen::MatrixXd Ejl =
          G.U[j].transpose() * G.U[l] + G.U[l].transpose() * G.U[j];
      const Eigen::MatrixXd Et = sd.basis.transpose() * Ejl * sd.basis;
      double h = 0.0;
      for (int p = 0; p < q; ++p)
        for (int r = 0; r < q; ++r) h += xt[p] * xt[r] * H1(p, r) * Et(p, r);
      for (int p = 0; p < q; ++p)
        for (int r = 0; r < q; ++r) {
          if (xt[p] == 0.0 && xt[r] == 0.0) continue;
          double acc = 0.0;
          for (int s = 0; s < q; ++s)
            acc += (Dt[j](p, s) * Dt[l](s, r) + Dt[l](p, s) * Dt[j](s, r)) *
                   ddiff2(f, sd.beta[p], sd.beta[s], sd.beta[r]);
          h += xt[p] * xt[r] * acc;
        }
      out.hess(j, l) = h;
      out.hess(l, j) = h;
    }
  return out;
}

Eigen::VectorXd grad_quadratic_form(const StepTwoGroup& G, const EvenKernel& f,
                                    const Eigen::VectorXd& tau, const Eigen::VectorXd& x) {
  return quad_form_derivs(G, f, spectral(G, tau), x, false).grad;
}

Eigen::MatrixXd hessian_quadratic_form(const StepTwoGroup& G, const EvenKernel& f,
                                       const Eigen::VectorXd& tau, const Eigen::VectorXd& x) {
  return quad_form_derivs(G, f, spectral(G, tau), x, true).hess;
}

Eigen::VectorXd apply_even_derivative(const StepTwoGroup& G, const EvenKernel& f,
                                      const SpectralData& sd, int j, const Eigen::VectorXd& v) {
  check_domain(f, sd);
  const int q = G.q;
  const Eigen::MatrixXd Ut = G.u_tilde(sd.tau);
  const Eigen::MatrixXd Dj = G.U[j].transpose() * Ut + Ut.transpose() * G.U[j];
  const Eigen::MatrixXd Dt = sd.basis.transpose() * Dj * sd.basis;
  const Eigen::VectorXd vt = sd.basis.transpose() * v;
  Eigen::VectorXd wt = Eigen::VectorXd::Zero(q);
  for (int p = 0; p < q; ++p)
    for (int r = 0; r < q; ++r) wt[p] += ddiff1(f, sd.beta[p], sd.beta[r]) * Dt(p, r) * vt[r];
  return sd.basis * wt;
}

}  // namespace ccdist
