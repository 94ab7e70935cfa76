#include "ccdist/optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ccdist/geodesics.hpp"
#include "ccdist/parallel.hpp"

namespace ccdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;

double norm_u(const StepTwoGroup& G, const Eigen::VectorXd& tau) {
  const SpectralData sd = spectral(G, tau);
  return std::sqrt(sd.max_beta());
}

}  // namespace

const char* to_string(InnerStatus s) {
  switch (s) {
    case InnerStatus::Interior: return "interior";
    case InnerStatus::Boundary: return "boundary";
    default: return "max_iter";
  }
}

InnerResult maximize_concave(int m, const TauObjective& f, double omega_radius,
                             const SolverConfig& cfg) {
  const double Z = omega_radius;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(m);
  TauEvaluation ev = f(tau);

  InnerResult out;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double scale = 1.0 + std::abs(ev.value);
    const double gnorm = ev.grad.norm();
    if (gnorm <= cfg.tol_grad * scale && ev.margin >= cfg.tol_boundary * Z) {
      out.theta = tau;
      out.value = ev.value;
      out.status = InnerStatus::Interior;
      out.iterations = iter;
      out.grad_norm = gnorm;
      out.margin = ev.margin;
      out.hess_tau = ev.hess;
      return out;
    }
    if (ev.margin < cfg.tol_boundary * Z && gnorm > cfg.tol_grad * scale) {
      // Margin exhausted with the objective still increasing: the supremum is
      // approached on the boundary, not attained.
      out.theta = tau;
      out.value = ev.value;
      out.status = InnerStatus::Boundary;
      out.iterations = iter;
      out.grad_norm = gnorm;
      out.margin = ev.margin;
      out.hess_tau = ev.hess;
      return out;
    }

    // Ascent direction: Newton when -H is safely positive definite,
    // regularized otherwise.
    Eigen::VectorXd d;
    {
      Eigen::MatrixXd negH = -ev.hess;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(negH);
      const double lmin = es.eigenvalues()[0];
      const double hscale = std::max(1e-12, negH.norm());
      const double reg = std::max(0.0, 1e-10 * hscale - lmin) + 1e-14 * hscale;
      negH += reg * Eigen::MatrixXd::Identity(m, m);
      d = negH.ldlt().solve(ev.grad);
      if (!d.allFinite() || d.dot(ev.grad) <= 0.0) d = ev.grad;
    }

    // Fraction-to-boundary: never consume more than 95% of the current margin.
    double alpha = 1.0;
    auto margin_at = [&](const Eigen::VectorXd& t) { return f(t).margin; };
    int guard = 0;
    while (guard++ < 80 && margin_at(tau + alpha * d) < 0.05 * ev.margin) alpha *= 0.5;

    // Armijo backtracking.
    TauEvaluation trial = f(tau + alpha * d);
    const double slope = ev.grad.dot(d);
    while (guard++ < 160 && trial.value < ev.value + 1e-4 * alpha * slope) {
      alpha *= 0.5;
      trial = f(tau + alpha * d);
    }
    if (trial.value <= ev.value && ev.grad.norm() <= 1e3 * cfg.tol_grad * scale) {
      // No progress from a nearly stationary point; accept as interior.
      out.theta = tau;
      out.value = ev.value;
      out.status = ev.margin >= cfg.tol_boundary * Z ? InnerStatus::Interior
                                                     : InnerStatus::Boundary;
      out.iterations = iter;
      out.grad_norm = ev.grad.norm();
      out.margin = ev.margin;
      out.hess_tau = ev.hess;
      return out;
    }
    tau += alpha * d;
    ev = trial;
  }
  out.theta = tau;
  out.value = ev.value;
  out.status = InnerStatus::MaxIter;
  out.iterations = cfg.max_iter;
  out.grad_norm = ev.grad.norm();
  out.margin = ev.margin;
  out.hess_tau = ev.hess;
  return out;
}

namespace {

// The reference evaluators throw once the margin is essentially zero; clamp
// the query back inside and report the true margin so the line search backs off.
TauEvaluation safe_eval(const StepTwoGroup& G, int k,
                        const std::function<ReferenceEval(const Eigen::VectorXd&)>& eval,
                        const Eigen::VectorXd& tau) {
  const double Z = omega_radius(k);
  const double margin = Z - norm_u(G, tau);
  if (margin < 1e-9 * Z) {
    TauEvaluation bad;
    bad.value = -kInf;
    bad.grad = Eigen::VectorXd::Zero(tau.size());
    bad.hess = Eigen::MatrixXd::Zero(tau.size(), tau.size());
    bad.margin = margin;
    return bad;
  }
  ReferenceEval r = eval(tau);
  return {r.value, r.grad_tau, r.hess_tau, r.boundary_margin};
}

}  // namespace

InnerResult inner_sup(const StepTwoGroup& G, const GroupPoint& g, const SegmentVector& s, int k,
                      const SolverConfig& cfg) {
  auto obj = [&](const Eigen::VectorXd& tau) {
    return safe_eval(G, k,
                     [&](const Eigen::VectorXd& t) {
                       return phi_k_star(G, g, s, t, k, EvalMode::TauBlock);
                     },
                     tau);
  };
  return maximize_concave(G.m, obj, omega_radius(k), cfg);
}

InnerResult sup_phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X, const Eigen::VectorXd& T,
                      int k, const SolverConfig& cfg) {
  auto obj = [&](const Eigen::VectorXd& tau) {
    return safe_eval(G, k,
                     [&](const Eigen::VectorXd& t) { return eval_phi_k(G, X, T, t, k); }, tau);
  };
  return maximize_concave(G.m, obj, omega_radius(k), cfg);
}

namespace {

struct OuterEval {
  double value;
  Eigen::VectorXd grad;  // empty when the envelope gradient is unavailable
  InnerResult inner;
};

OuterEval eval_outer(const StepTwoGroup& G, const GroupPoint& g, int k,
                     const Eigen::VectorXd& s_flat, const SolverConfig& cfg) {
  const SegmentVector s = SegmentVector::unflatten(s_flat, k, G.q);
  OuterEval out;
  out.inner = inner_sup(G, g, s, k, cfg);
  out.value = out.inner.value;
  if (out.inner.status == InnerStatus::Interior) {
    // Envelope gradient: d/ds sup_tau Phi = grad_s Phi at the maximizer,
    // valid when the maximizer is interior and locally unique.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-out.inner.hess_tau);
    const double hscale = std::max(1e-12, out.inner.hess_tau.norm());
    if (es.eigenvalues()[0] >= 1e-8 * hscale) {
      const ReferenceEval r =
          phi_k_star(G, g, s, out.inner.theta, k, EvalMode::TauBlock);
      Eigen::VectorXd grad(k * G.q);
      for (int j = 0; j < k; ++j) grad.segment(j * G.q, G.q) = r.grad_s[j];
      out.grad = grad;
    }
  }
  return out;
}

struct StartOutcome {
  Eigen::VectorXd s;
  double value = kInf;
  InnerResult inner;
  double grad_norm = kInf;
  int iterations = 0;
};

StartOutcome run_outer_start(const StepTwoGroup& G, const GroupPoint& g, int k,
                             Eigen::VectorXd x, const SolverConfig& cfg) {
  const int dim = static_cast<int>(x.size());
  OuterEval cur = eval_outer(G, g, k, x, cfg);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd prev_g, prev_x;
  int iters = 0;
  double compass_step = 0.0;

  for (; iters < cfg.max_iter; ++iters) {
    const double scale = 1.0 + std::abs(cur.value);
    if (cur.grad.size() > 0) {
      const double gnorm = cur.grad.norm();
      if (gnorm <= 1e-8 * scale) break;
      Eigen::VectorXd d = -Hinv * cur.grad;
      if (!d.allFinite() || d.dot(cur.grad) >= 0.0) {
        Hinv.setIdentity();
        d = -cur.grad;
      }
      double alpha = 1.0;
      OuterEval trial;
      bool accepted = false;
      const double slope = cur.grad.dot(d);
      for (int ls = 0; ls < 40; ++ls) {
        trial = eval_outer(G, g, k, x + alpha * d, cfg);
        if (trial.value <= cur.value + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      const Eigen::VectorXd xn = x + alpha * d;
      if (trial.grad.size() > 0) {
        const Eigen::VectorXd sk = xn - x;
        const Eigen::VectorXd yk = trial.grad - cur.grad;
        const double sy = sk.dot(yk);
        if (sy > 1e-12 * sk.norm() * yk.norm()) {
          const Eigen::VectorXd Hy = Hinv * yk;
          const double yHy = yk.dot(Hy);
          Hinv += ((sy + yHy) / (sy * sy)) * (sk * sk.transpose()) -
                  (Hy * sk.transpose() + sk * Hy.transpose()) / sy;
        }
      } else {
        Hinv.setIdentity();
      }
      x = xn;
      cur = trial;
    } else {
      // Inner supremum on the boundary: no envelope gradient, take compass steps.
      if (compass_step == 0.0) compass_step = 0.25 * (1.0 + x.norm());
      bool improved = false;
      for (int i = 0; i < dim && !improved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd xt = x;
          xt[i] += sgn * compass_step;
          OuterEval trial = eval_outer(G, g, k, xt, cfg);
          if (trial.value < cur.value - 1e-14 * scale) {
            x = xt;
            cur = trial;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        compass_step *= 0.5;
        if (compass_step < 1e-9 * (1.0 + x.norm())) break;
      }
    }
  }

  StartOutcome out;
  out.s = x;
  out.value = cur.value;
  out.inner = cur.inner;
  out.grad_norm = cur.grad.size() > 0 ? cur.grad.norm() : kInf;
  out.iterations = iters;
  return out;
}

}  // namespace

OuterResult outer_inf(const StepTwoGroup& G, const GroupPoint& g, int k, const SolverConfig& cfg,
                      const std::vector<SegmentVector>* warm_starts) {
  OuterResult out;
  if (k == 0) {
    const InnerResult ir = inner_sup(G, g, SegmentVector::zeros(0, G.q), 0, cfg);
    out.s_star = SegmentVector::zeros(0, G.q);
    out.theta_star = ir.theta;
    out.value = ir.value;
    out.inner_status = ir.status;
    out.attained = (ir.status == InnerStatus::Interior);
    out.outer_grad_norm = 0.0;
    out.iterations = ir.iterations;
    return out;
  }

  const int dim = k * G.q;
  std::vector<Eigen::VectorXd> starts;
  if (warm_starts)
    for (const auto& w : *warm_starts)
      if (w.k == k) starts.push_back(w.flatten());
  starts.push_back(Eigen::VectorXd::Zero(dim));
  double sigma = (g.x.norm() + g.t.cwiseAbs().cwiseSqrt().sum()) / std::sqrt(2.0 * k + 3.0);
  sigma = std::max(sigma, 0.1);
  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (r + 1) + 31 * k));
    std::normal_distribution<double> N(0.0, sigma);
    Eigen::VectorXd s0(dim);
    for (int i = 0; i < dim; ++i) s0[i] = N(rng);
    starts.push_back(s0);
  }

  std::vector<StartOutcome> results(starts.size());
  parallel_for(static_cast<int>(starts.size()), [&](int i) {
    results[i] = run_outer_start(G, g, k, starts[i], cfg);
  });

  int best = 0;
  double vmin = kInf, vmax = -kInf;
  for (size_t i = 0; i < results.size(); ++i) {
    vmin = std::min(vmin, results[i].value);
    vmax = std::max(vmax, results[i].value);
    if (results[i].value < results[best].value) best = static_cast<int>(i);
  }
  const StartOutcome& win = results[best];
  out.s_star = SegmentVector::unflatten(win.s, k, G.q);
  out.theta_star = win.inner.theta;
  out.value = win.value;
  out.inner_status = win.inner.status;
  const double scale = 1.0 + std::abs(win.value);
  out.outer_grad_norm = win.grad_norm;
  out.attained =
      (win.inner.status == InnerStatus::Interior) && (win.grad_norm <= 1e-6 * scale);
  out.iterations = win.iterations;
  out.restart_spread = vmax - vmin;
  return out;
}

namespace {

// Minimizer of the appended-block quadratic
//   v -> 2(2k+3)|v|^2 + 2 v^T A_{k+1}(tau) v + c^T v,
// the mechanism by which level k+1 collapses back to level k.
struct BlockQuadratic {
  Eigen::MatrixXd M;  // Hessian: 4(2k+3) I + 4 A_{k+1}(tau)
  Eigen::VectorXd c;
};

BlockQuadratic appended_block(const StepTwoGroup& G, const GroupPoint& g,
                              const SegmentVector& s, int k, const Eigen::VectorXd& tau) {
  BlockQuadratic bq;
  const SpectralData sd = spectral(G, tau);
  const Eigen::MatrixXd A = apply_even(rk_kernel(k + 1), sd);
  bq.M = 4.0 * (2.0 * (k + 1) + 1.0) * Eigen::MatrixXd::Identity(G.q, G.q) + 4.0 * A;
  const Eigen::MatrixXd Ut = G.u_tilde(tau);
  if (k == 0)
    bq.c = (4.0 / kSqrt2) * Ut.transpose() * g.x;
  else
    bq.c = 4.0 * Ut.transpose() * s.s[k - 1];
  return bq;
}

}  // namespace

MinimaxResidual minimax_residual_at(const StepTwoGroup& G, const GroupPoint& g,
                                    const SegmentVector& s, int k, const Eigen::VectorXd& tau) {
  MinimaxResidual out;
  const BlockQuadratic bq = appended_block(G, g, s, k, tau);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bq.M);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::VectorXd ct = es.eigenvectors().transpose() * bq.c;
  const double tol = 1e-9 * std::max(1.0, bq.M.norm());
  Eigen::VectorXd vt = Eigen::VectorXd::Zero(G.q);
  for (int i = 0; i < G.q; ++i) {
    if (lam[i] < -tol || (std::abs(lam[i]) <= tol && std::abs(ct[i]) > tol)) {
      out.unbounded = true;
      return out;
    }
    if (lam[i] > tol) vt[i] = -ct[i] / lam[i];
  }
  const Eigen::VectorXd v = es.eigenvectors() * vt;

  SegmentVector s_ext = s;
  s_ext.k = k + 1;
  s_ext.s.push_back(v);
  out.inf_value = phi_k_star(G, g, s_ext, tau, k + 1, EvalMode::ValueOnly).value;
  out.base_value = phi_k_star(G, g, s, tau, k, EvalMode::ValueOnly).value;
  out.rel_error =
      std::abs(out.inf_value - out.base_value) / (1.0 + std::abs(out.base_value));
  return out;
}

MinimaxReport minimax_residual_check(const StepTwoGroup& G, const GroupPoint& g,
                                     const SegmentVector& s_star,
                                     const Eigen::VectorXd& theta_star, int k,
                                     const SolverConfig& cfg) {
  MinimaxReport rep;
  std::vector<Eigen::VectorXd> inside;
  inside.push_back(Eigen::VectorXd::Zero(G.m));
  if (theta_star.size() == G.m) {
    inside.push_back(theta_star);
    inside.push_back(0.5 * theta_star);
  }
  // A near-boundary interior point along a deterministic direction.
  Eigen::VectorXd dir = Eigen::VectorXd::Ones(G.m);
  dir.normalize();
  const double nu = norm_u(G, dir);
  if (nu > 0) {
    inside.push_back(dir * (0.9 * omega_radius(k) / nu));
    for (const auto& tau : inside) {
      if (omega_margin(G, tau, k) <= 0) continue;
      const MinimaxResidual res = minimax_residual_at(G, g, s_star, k, tau);
      ++rep.inside_checked;
      rep.max_rel_error_inside = std::max(rep.max_rel_error_inside, res.rel_error);
    }
    // Points beyond the level-k closure but inside level k+1.
    for (double f : {1.05, 1.4}) {
      const Eigen::VectorXd tau = dir * (f * omega_radius(k) / nu);
      if (omega_margin(G, tau, k + 1) <= 0) continue;
      const MinimaxResidual res = minimax_residual_at(G, g, s_star, k, tau);
      ++rep.outside_checked;
      if (!res.unbounded) rep.all_outside_unbounded = false;
    }
  }
  (void)cfg;
  return rep;
}

namespace {

// Lift a level-k solution to level k+1 by appending the block minimizer;
// the lifted point reproduces the level-k value and seeds the next search.
SegmentVector lift_solution(const StepTwoGroup& G, const GroupPoint& g,
                            const SegmentVector& s, int k, const Eigen::VectorXd& theta) {
  SegmentVector out = s;
  out.k = k + 1;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(G.q);
  if (omega_margin(G, theta, k + 1) > 0) {
    const BlockQuadratic bq = appended_block(G, g, s, k, theta);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(bq.M);
    if (ldlt.info() == Eigen::Success) {
      const Eigen::VectorXd sol = ldlt.solve(-bq.c);
      if (sol.allFinite()) v = sol;
    }
  }
  out.s.push_back(v);
  return out;
}

}  // namespace

std::vector<OuterResult> level_sweep(const StepTwoGroup& G, const GroupPoint& g, int k_max,
                                     const SolverConfig& cfg) {
  std::vector<OuterResult> out;
  for (int k = 0; k <= k_max; ++k) {
    std::vector<SegmentVector> warm;
    if (!out.empty())
      warm.push_back(lift_solution(G, g, out.back().s_star, k - 1, out.back().theta_star));
    out.push_back(outer_inf(G, g, k, cfg, warm.empty() ? nullptr : &warm));
  }
  return out;
}

DistanceCertificate distance(const StepTwoGroup& G, const GroupPoint& g,
                             const SolverConfig& cfg) {
  DistanceCertificate cert;
  cert.upper = kInf;
  std::optional<OuterResult> prev;

  for (int k = 0; k <= cfg.max_k; ++k) {
    std::vector<SegmentVector> warm;
    if (prev) warm.push_back(lift_solution(G, g, prev->s_star, k - 1, prev->theta_star));
    const OuterResult res = outer_inf(G, g, k, cfg, warm.empty() ? nullptr : &warm);
    cert.level_values.push_back(res.value);
    cert.level_status.push_back(res.inner_status);
    cert.iterations += res.iterations;
    cert.restart_spread = std::max(cert.restart_spread, res.restart_spread);

    bool accept = res.attained;
    bool stabilized = false;
    if (!accept && cfg.accept_stabilized && prev) {
      const double scale = 1.0 + std::abs(res.value);
      if (std::abs(res.value - prev->value) <= cfg.stabilize_rel * scale) {
        accept = true;
        stabilized = true;
      }
    }
    if (accept) {
      cert.attained = true;
      cert.stabilized = stabilized;
      cert.d2 = res.value;
      cert.k_used = k;
      cert.s_star = res.s_star;
      cert.theta_star = res.theta_star;
      cert.lower = res.value;
      if (auto rec = recover_geodesic(G, g, res.theta_star)) {
        cert.covector = rec->covector;
        cert.upper = rec->energy;
      }
      return cert;
    }
    prev = res;
  }

  // Never attained: report the best bracket.
  cert.attained = false;
  cert.d2 = cert.level_values.back();
  cert.k_used = cfg.max_k;
  cert.lower = cert.level_values.back();
  cert.s_star = prev->s_star;
  cert.theta_star = prev->theta_star;
  if (auto rec = recover_geodesic(G, g, prev->theta_star)) {
    cert.covector = rec->covector;
    cert.upper = rec->energy;
  }
  return cert;
}

double lower_bound(const StepTwoGroup& G, const GroupPoint& g, int k, const SolverConfig& cfg) {
  return outer_inf(G, g, k, cfg).value;
}

std::optional<double> upper_bound_if_in_Mk(const StepTwoGroup& G, const GroupPoint& g,
                                           const SegmentVector& s, int k,
                                           const SolverConfig& cfg) {
  if (k < 1) throw Error("upper_bound_if_in_Mk requires k >= 1");
  const InnerResult ir = inner_sup(G, g, s, k, cfg);
  if (ir.status != InnerStatus::Interior) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-ir.hess_tau);
  const double hscale = std::max(1e-12, ir.hess_tau.norm());
  if (es.eigenvalues()[0] < 1e-10 * hscale) return std::nullopt;
  return ir.value;
}

}  // namespace ccdist
