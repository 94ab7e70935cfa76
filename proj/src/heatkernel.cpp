#include "ccdist/heatkernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

#include "ccdist/bessel.hpp"
#include "ccdist/parallel.hpp"

namespace ccdist {

namespace {

using Cx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- complex even kernels (arguments w = z^2, branch-free) ----

Cx sqrt_right_half(Cx w) {
  Cx z = std::sqrt(w);
  if (z.real() < 0.0) z = -z;
  return z;
}

// z / sinh z at z^2 = w
Cx f_inv_sinhc(Cx w) {
  if (std::abs(w) < 1e-8) {
    return 1.0 - w / 6.0 + 7.0 * w * w / 360.0 - 31.0 * w * w * w / 15120.0;
  }
  const Cx z = sqrt_right_half(w);
  if (z.real() > 30.0) {
    const Cx e = std::exp(-z);
    return 2.0 * z * e / (1.0 - e * e);
  }
  return z / std::sinh(z);
}

// z coth z at z^2 = w
Cx f_zcothz(Cx w) {
  if (std::abs(w) < 1e-8) {
    return 1.0 + w / 3.0 - w * w / 45.0 + 2.0 * w * w * w / 945.0;
  }
  const Cx z = sqrt_right_half(w);
  if (z.real() > 30.0) {
    const Cx e2 = std::exp(-2.0 * z);
    return z * (1.0 + e2) / (1.0 - e2);
  }
  return z * std::cosh(z) / std::sinh(z);
}

// log(b / sinh b) at beta = b^2 >= 0, stable for large beta.
double log_inv_sinhc(double beta) {
  return -(bessel::log_qk(0, beta) + 0.5 * std::log(kPi / 2.0));
}

// b coth b at beta = b^2 >= 0.
double bcothb(double beta) { return 1.0 + bessel::rk(0, beta); }

// ---- Gauss-Legendre nodes (on [-1, 1]) ----

struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const GaussRule& legendre_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

const GaussRule& hermite_rule(int n) {
  // Physicists' Gauss-Hermite: integral of e^{-y^2} f(y).
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = std::sqrt(i / 2.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = std::sqrt(kPi) * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// ---- generic tensor quadrature with offsetting ----

struct Integrand {
  // log |f(lambda)| up to the common offset; used for truncation and offset.
  std::function<double(const Eigen::VectorXd&)> log_abs;
  // f(lambda) * exp(-offset)
  std::function<Cx(const Eigen::VectorXd&, double)> scaled;
};

double pairwise_sum(std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

struct TensorSum {
  double re = 0.0, im = 0.0, abs = 0.0;
};

TensorSum tensor_integrate(const Integrand& f, int m, double offset, double Lambda, int panels,
                           int order) {
  const GaussRule& rule = legendre_rule(order);
  const int per_axis = panels * order;
  std::vector<double> nodes(per_axis), weights(per_axis);
  const double pw = 2.0 * Lambda / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < order; ++i) {
      nodes[p * order + i] = -Lambda + pw * (p + 0.5 * (1.0 + rule.nodes[i]));
      weights[p * order + i] = 0.5 * pw * rule.weights[i];
    }

  long total = 1;
  for (int a = 0; a < m; ++a) total *= per_axis;

  std::vector<double> res(per_axis, 0.0), ims(per_axis, 0.0), abss(per_axis, 0.0);
  parallel_for(per_axis, [&](int i0) {
    Eigen::VectorXd lam(m);
    double re = 0.0, im = 0.0, ab = 0.0;
    long inner = total / per_axis;
    for (long rest = 0; rest < inner; ++rest) {
      long idx = rest;
      lam[0] = nodes[i0];
      double w = weights[i0];
      for (int a = 1; a < m; ++a) {
        const int ia = static_cast<int>(idx % per_axis);
        idx /= per_axis;
        lam[a] = nodes[ia];
        w *= weights[ia];
      }
      const Cx v = f.scaled(lam, offset);
      re += w * v.real();
      im += w * v.imag();
      ab += std::abs(w) * std::abs(v);
    }
    res[i0] = re;
    ims[i0] = im;
    abss[i0] = ab;
  });
  TensorSum out;
  out.re = pairwise_sum(res, 0, res.size());
  out.im = pairwise_sum(ims, 0, ims.size());
  out.abs = pairwise_sum(abss, 0, abss.size());
  return out;
}

struct IntegralResult {
  double log_integral = 0.0;  // log of the (positive) real part
  double raw_re = 0.0;        // scaled real part, sign preserved
  double offset = 0.0;
  double rel_error = 0.0;
  double imag_residual = 0.0;
  double radius = 0.0;
  bool converged = false;
};

IntegralResult integrate_adaptive(const Integrand& f, int m, double peak_width,
                                  const QuadConfig& quad) {
  IntegralResult out;

  // Offset from a coarse scan along each axis plus the origin.
  double offset = -kInf;
  double Lambda = 8.0;
  auto scan_offset = [&](double L) {
    double M = -kInf;
    const int n = 257;
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < m; ++a) {
      for (int i = 0; i < n; ++i) {
        lam.setZero();
        lam[a] = -L + 2.0 * L * i / (n - 1);
        M = std::max(M, f.log_abs(lam));
      }
    }
    return M;
  };
  offset = scan_offset(Lambda);

  // Grow the box until the boundary amplitude is negligible.
  const double decay_target = std::log(1e-3 * quad.rel_tol);
  bool truncated_ok = false;
  while (true) {
    double boundary = -kInf;
    Eigen::VectorXd lam(m);
    const int probes = m == 1 ? 2 : (m == 2 ? 16 : 64);
    for (int p = 0; p < probes; ++p) {
      // Deterministic probes on the boundary faces.
      unsigned code = static_cast<unsigned>(p);
      for (int a = 0; a < m; ++a) {
        const int sel = code % 4;
        code /= 4;
        lam[a] = (sel == 0 ? -Lambda : (sel == 1 ? Lambda : (sel == 2 ? 0.5 * Lambda : -0.5 * Lambda)));
      }
      lam[p % m] = (p % 2 == 0) ? Lambda : -Lambda;  // force onto a face
      boundary = std::max(boundary, f.log_abs(lam));
    }
    if (boundary - offset <= decay_target) {
      truncated_ok = true;
      break;
    }
    if (Lambda >= quad.lambda_cap) break;
    Lambda = std::min(quad.lambda_cap, Lambda * 1.5);
    offset = std::max(offset, scan_offset(Lambda));
  }
  out.radius = Lambda;
  out.offset = offset;

  // Panel count: resolve the peak, then double until two consecutive
  // agreements.
  int panels = std::max(2, std::min(m >= 3 ? 8 : 256,
                                    static_cast<int>(std::ceil(Lambda / (4.0 * peak_width)))));
  TensorSum prev = tensor_integrate(f, m, offset, Lambda, panels, quad.order);
  double agree = kInf;
  bool once = false;
  for (int d = 0; d < quad.max_doublings; ++d) {
    if (m >= 3 && panels >= 32) break;
    panels *= 2;
    const TensorSum cur = tensor_integrate(f, m, offset, Lambda, panels, quad.order);
    const double denom = std::max(std::abs(cur.re), 1e-300);
    agree = std::abs(cur.re - prev.re) / denom;
    prev = cur;
    const bool ok = agree <= quad.rel_tol + quad.abs_tol / denom;
    if (ok && once) break;
    once = ok;
  }

  const double roundoff = 1e-16 * prev.abs / std::max(std::abs(prev.re), 1e-300);
  out.raw_re = prev.re;
  out.rel_error = agree + roundoff;
  out.imag_residual = std::abs(prev.im) / std::max(std::abs(prev.re), 1e-300);
  out.converged = truncated_ok && (agree <= 64.0 * quad.rel_tol) && (roundoff < 1e-3) &&
                  prev.re > 0.0;
  if (prev.re > 0.0) out.log_integral = offset + std::log(prev.re);
  return out;
}

// Representative eigenvalues of the doubled pairs (nonzero spectrum of a real
// skew matrix has even multiplicity; zero modes contribute factor one).
std::vector<double> pair_representatives(const Eigen::VectorXd& beta) {
  std::vector<double> nz;
  for (int i = 0; i < beta.size(); ++i)
    if (beta[i] > 1e-14 * std::max(1.0, beta[beta.size() - 1])) nz.push_back(beta[i]);
  std::sort(nz.begin(), nz.end());
  std::vector<double> reps;
  for (size_t i = 0; i + 1 < nz.size(); i += 2) reps.push_back(0.5 * (nz[i] + nz[i + 1]));
  return reps;
}

Integrand heat_integrand_m1(const StepTwoGroup& G, const GroupPoint& g, double h, double theta) {
  // Single vertical direction: S(lambda) = lambda^2 S(1), so one fixed real
  // eigenbasis serves the whole (shifted) contour.
  Eigen::VectorXd e1 = Eigen::VectorXd::Ones(1);
  const SpectralData sd = spectral(G, e1);
  const Eigen::VectorXd beta0 = sd.beta;
  const Eigen::VectorXd xt = sd.basis.transpose() * g.x;
  const std::vector<double> reps = pair_representatives(beta0);
  const double t0 = g.t[0];

  Integrand f;
  auto exponent = [=](double lam) -> Cx {
    const Cx mu(lam, theta);
    const Cx mu2 = mu * mu;
    Cx logV = 0.0;
    for (double b0 : reps) logV += std::log(f_inv_sinhc(mu2 * b0));
    Cx P = 0.0;
    for (int i = 0; i < beta0.size(); ++i)
      if (xt[i] != 0.0) P += f_zcothz(mu2 * beta0[i]) * (xt[i] * xt[i]);
    return logV - P / (4.0 * h) - t0 * theta / h + Cx(0.0, 1.0) * (t0 * lam / h);
  };
  f.log_abs = [exponent](const Eigen::VectorXd& lam) { return exponent(lam[0]).real(); };
  f.scaled = [exponent](const Eigen::VectorXd& lam, double offset) {
    return std::exp(exponent(lam[0]) - offset);
  };
  return f;
}

// log(f_inv_sinhc) stays in a single branch on the shifted contour because
// ||U(Im mu)|| < pi keeps every factor in the right half plane; the complex
// log of each factor is therefore continuous and the sum is safe.

Integrand heat_integrand_real(const StepTwoGroup& G, const GroupPoint& g, double h) {
  Integrand f;
  const Eigen::VectorXd x = g.x;
  const Eigen::VectorXd t = g.t;
  auto exponent_re = [&G, x, h](const Eigen::VectorXd& lam) {
    const SpectralData sd = spectral(G, lam);
    const std::vector<double> reps = pair_representatives(sd.beta);
    double logV = 0.0;
    for (double b : reps) logV += log_inv_sinhc(b);
    const Eigen::VectorXd xt = sd.basis.transpose() * x;
    double P = 0.0;
    for (int i = 0; i < sd.beta.size(); ++i)
      if (xt[i] != 0.0) P += bcothb(sd.beta[i]) * xt[i] * xt[i];
    return logV - P / (4.0 * h);
  };
  f.log_abs = exponent_re;
  f.scaled = [&G, x, t, h, exponent_re](const Eigen::VectorXd& lam, double offset) {
    const double e = exponent_re(lam) - offset;
    const double phase = t.dot(lam) / h;
    return std::exp(e) * Cx(std::cos(phase), std::sin(phase));
  };
  return f;
}

double heat_peak_width(const GroupPoint& g, double h) {
  // Width of the dominant factor exp(-(|x|^2 + beta-weighted) lambda^2 ... /4h);
  // fall back to the vertical oscillation scale when x is small.
  const double x2 = g.x.squaredNorm();
  double w = kInf;
  if (x2 > 1e-12) w = std::sqrt(12.0 * h / x2);
  const double tn = g.t.cwiseAbs().maxCoeff();
  if (tn > 1e-12) w = std::min(w, 2.0 * kPi * h / tn);
  if (!std::isfinite(w)) w = 1.0;
  return std::clamp(w, 1e-4, 2.0);
}

}  // namespace

double heat_constant(int q, int m) {
  return std::pow(4.0 * kPi, -0.5 * q) * std::pow(2.0 * kPi, -static_cast<double>(m));
}

double heat_constant_tilde(int q, int m) {
  return heat_constant(q, m) * std::pow(2.0 / kPi, 0.25 * q);
}

HeatKernelEstimate heat_kernel(const StepTwoGroup& G, const GroupPoint& g, double h,
                               const QuadConfig& quad) {
  if (G.m > 3) throw UnsupportedDimension("heat_kernel: m > 3 not supported");
  if (!(h > 0)) throw Error("heat_kernel: h must be positive");

  double theta_shift = 0.0;
  if (G.m == 1) {
    SolverConfig cfg;
    const InnerResult ir = inner_sup(G, g, SegmentVector::zeros(0, G.q), 0, cfg);
    const double Z = omega_radius(0);
    const double nu = std::sqrt(spectral(G, ir.theta).max_beta());
    if (ir.status == InnerStatus::Interior) {
      theta_shift = ir.theta[0];
    } else if (nu > 0) {
      // Pull the boundary supremum back inside; the pole distance trades off
      // against the leftover oscillation e^{-t delta / h}.
      const double t_eff = std::max(g.t.cwiseAbs().maxCoeff(), h);
      const double delta = std::clamp(h / t_eff, 1e-6 * Z, 0.2 * Z);
      theta_shift = ir.theta[0] * std::min(1.0, (Z - delta) / nu);
    }
  }

  const Integrand f = (G.m == 1) ? heat_integrand_m1(G, g, h, theta_shift)
                                 : heat_integrand_real(G, g, h);
  const IntegralResult res = integrate_adaptive(f, G.m, heat_peak_width(g, h), quad);

  HeatKernelEstimate out;
  out.h = h;
  out.quad_error = res.rel_error;
  out.imag_residual = res.imag_residual;
  out.truncation_radius = res.radius;
  out.converged = res.converged;
  const double logC = std::log(heat_constant(G.q, G.m));
  const double logpre = logC - (0.5 * G.q + G.m) * std::log(h);
  if (res.raw_re > 0.0) {
    out.log_value = logpre + res.log_integral;
    out.value = std::exp(out.log_value);
  } else {
    out.log_value = -kInf;
    out.value = res.raw_re * std::exp(logpre + res.offset);
    out.converged = false;
  }
  return out;
}

HeatKernelEstimate p_k_h(const StepTwoGroup& G, int k, const Eigen::VectorXd& X,
                         const Eigen::VectorXd& T, double h, const QuadConfig& quad) {
  if (G.m > 3) throw UnsupportedDimension("p_k_h: m > 3 not supported");
  if (!(h > 0)) throw Error("p_k_h: h must be positive");
  if (X.size() != G.q || T.size() != G.m) throw DimensionMismatch("p_k_h: (X,T) dimensions");

  Integrand f;
  auto exponent_re = [&G, X, h, k](const Eigen::VectorXd& lam) {
    const SpectralData sd = spectral(G, lam);
    double logA = 0.0;
    for (int i = 0; i < sd.beta.size(); ++i) logA -= 0.5 * bessel::log_qk(k, sd.beta[i]);
    const Eigen::VectorXd Xt = sd.basis.transpose() * X;
    double P = 0.0;
    for (int i = 0; i < sd.beta.size(); ++i)
      if (Xt[i] != 0.0) P += bessel::rk(k, sd.beta[i]) * Xt[i] * Xt[i];
    return logA - P / (2.0 * h);
  };
  f.log_abs = exponent_re;
  f.scaled = [&G, T, h, exponent_re](const Eigen::VectorXd& lam, double offset) {
    const double e = exponent_re(lam) - offset;
    const double phase = T.dot(lam) / h;
    return std::exp(e) * Cx(std::cos(phase), std::sin(phase));
  };

  GroupPoint fake{X, T};
  const IntegralResult res = integrate_adaptive(f, G.m, heat_peak_width(fake, h), quad);

  HeatKernelEstimate out;
  out.h = h;
  out.quad_error = res.rel_error;
  out.imag_residual = res.imag_residual;
  out.truncation_radius = res.radius;
  out.converged = res.converged;
  const double logpre = -(0.5 * (k + 1) * G.q + G.m) * std::log(h);
  if (res.raw_re > 0.0) {
    out.log_value = logpre + res.log_integral;
    out.value = std::exp(out.log_value);
  } else {
    out.log_value = -kInf;
    out.value = res.raw_re * std::exp(logpre + res.offset);
    out.converged = false;
  }
  return out;
}

RelationReport verify_relation_pk(const StepTwoGroup& G, int k, const Eigen::VectorXd& X,
                                  const Eigen::VectorXd& T, double h, const QuadConfig& quad) {
  if (G.q > 3 || G.m > 2)
    throw UnsupportedDimension("verify_relation_pk: nested quadrature needs q <= 3, m <= 2");
  const HeatKernelEstimate lhs = p_k_h(G, k, X, T, h, quad);

  const GaussRule& gh = hermite_rule(quad.hermite_order);
  const double c = std::sqrt(2.0 * h / (2.0 * k + 3.0));
  const int n = quad.hermite_order;
  long total = 1;
  for (int a = 0; a < G.q; ++a) total *= n;

  std::vector<double> contrib(total, 0.0);
  bool inner_ok = true;
  QuadConfig inner_quad = quad;
  inner_quad.rel_tol = std::max(quad.rel_tol, 1e-7);
  std::mutex flag_mu;
  parallel_for(static_cast<int>(total), [&](int flat) {
    Eigen::VectorXd s(G.q);
    long idx = flat;
    double w = 1.0;
    for (int a = 0; a < G.q; ++a) {
      const int ia = static_cast<int>(idx % n);
      idx /= n;
      s[a] = c * gh.nodes[ia];
      w *= gh.weights[ia];
    }
    const Eigen::VectorXd Ts = T + G.pairing(X, s);
    const HeatKernelEstimate inner = p_k_h(G, k + 1, s, Ts, h, inner_quad);
    if (!inner.converged) {
      std::lock_guard<std::mutex> lock(flag_mu);
      inner_ok = false;
    }
    contrib[flat] = w * inner.value;
  });
  const double integral = std::pow(c, G.q) * pairwise_sum(contrib, 0, contrib.size());
  const double rhs = std::pow(2.0 * kPi, -0.5 * G.q) * integral;

  RelationReport rep;
  rep.lhs = lhs.value;
  rep.rhs = rhs;
  rep.rel_discrepancy = std::abs(lhs.value - rhs) / std::max(std::abs(lhs.value), 1e-300);
  rep.converged = lhs.converged && inner_ok;
  return rep;
}

VaradhanResult varadhan_estimate(const StepTwoGroup& G, const GroupPoint& g,
                                 const std::vector<double>& h_list, const QuadConfig& quad) {
  VaradhanResult out;
  out.all_converged = true;
  for (double h : h_list) {
    const HeatKernelEstimate est = heat_kernel(G, g, h, quad);
    out.h_values.push_back(h);
    out.estimates.push_back(-4.0 * h * est.log_value);
    if (!est.converged) out.all_converged = false;
  }
  // Least-squares fit est(h) = d2 + a h log(1/h) + b h.
  const int n = static_cast<int>(h_list.size());
  if (n >= 3) {
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const double h = h_list[i];
      A(i, 0) = 1.0;
      A(i, 1) = h * std::log(1.0 / h);
      A(i, 2) = h;
      y[i] = out.estimates[i];
    }
    out.extrapolated = (A.colPivHouseholderQr().solve(y))[0];
  } else if (n > 0) {
    out.extrapolated = out.estimates.back();
  }
  // Monotone approach from below as h decreases (h_list given decreasing).
  out.monotone = true;
  for (int i = 1; i < n; ++i) {
    if (!(h_list[i] < h_list[i - 1])) out.monotone = false;
    if (out.estimates[i] < out.estimates[i - 1] - 1e-9) out.monotone = false;
  }
  return out;
}

AsymptoticTerm asymptotic_leading_term(const StepTwoGroup& G, const GroupPoint& g, int k,
                                       double h, const SolverConfig& cfg) {
  AsymptoticTerm out;
  if (k == 0) {
    const InnerResult ir = inner_sup(G, g, SegmentVector::zeros(0, G.q), 0, cfg);
    if (ir.status != InnerStatus::Interior)
      throw NotInM("no interior maximizer of the level-0 reference function");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-ir.hess_tau);
    if (es.eigenvalues()[0] <= 1e-10 * std::max(1.0, ir.hess_tau.norm()))
      throw NotInM("degenerate maximizer of the level-0 reference function");
    const SpectralData sd = spectral(G, ir.theta);
    double logV = 0.0;
    for (int i = 0; i < sd.beta.size(); ++i)
      logV += 0.5 * std::log(inv_sinc_kernel().value(sd.beta[i]));
    double logdet = 0.0;
    for (int i = 0; i < G.m; ++i) logdet += std::log(es.eigenvalues()[i]);
    out.log_value = std::log(heat_constant(G.q, G.m)) + 0.5 * G.m * std::log(8.0 * kPi) -
                    0.5 * (G.q + G.m) * std::log(h) + logV - ir.value / (4.0 * h) -
                    0.5 * logdet;
    out.value = std::exp(out.log_value);
    out.theta = ir.theta;
    return out;
  }
  const InnerResult ir = sup_phi_k(G, g.x, g.t, k, cfg);
  if (ir.status != InnerStatus::Interior)
    throw NotInM("no interior maximizer of the level-k reference function");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-ir.hess_tau);
  if (es.eigenvalues()[0] <= 1e-10 * std::max(1.0, ir.hess_tau.norm()))
    throw NotInM("degenerate maximizer of the level-k reference function");
  const SpectralData sd = spectral(G, ir.theta);
  double log_detq = 0.0;
  for (int i = 0; i < sd.beta.size(); ++i) log_detq += std::log(bessel::qk(k, -sd.beta[i]));
  double logdet = 0.0;
  for (int i = 0; i < G.m; ++i) logdet += std::log(es.eigenvalues()[i]);
  out.log_value = -0.5 * ((k + 1) * G.q + G.m) * std::log(h) +
                  0.5 * G.m * std::log(8.0 * kPi) - 0.5 * log_detq - ir.value / (4.0 * h) -
                  0.5 * logdet;
  out.value = std::exp(out.log_value);
  out.theta = ir.theta;
  return out;
}

}  // namespace ccdist
