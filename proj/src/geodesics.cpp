#include "ccdist/geodesics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "ccdist/parallel.hpp"

namespace ccdist {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FlowState {
  Eigen::VectorXd x, t, xi;
};

FlowState rhs(const StepTwoGroup& G, const Eigen::MatrixXd& Ut, const FlowState& y) {
  FlowState d;
  const Eigen::VectorXd u = y.xi - 0.5 * Ut * y.x;
  d.x = u;
  d.t = 0.5 * G.pairing(y.x, u);
  d.xi = -0.5 * Ut * u;
  return d;
}

}  // namespace

namespace {

FlowState integrate_flow(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                         const Eigen::VectorXd& tauhat, int steps,
                         std::vector<FlowSample>* trace) {
  if (zeta.size() != G.q || tauhat.size() != G.m)
    throw DimensionMismatch("exp_map: covector dimensions");
  const Eigen::MatrixXd Ut = G.u_tilde(tauhat);
  FlowState y{Eigen::VectorXd::Zero(G.q), Eigen::VectorXd::Zero(G.m), zeta};
  const double h = 1.0 / steps;
  if (trace) trace->push_back({0.0, y.x, y.t, y.xi});
  for (int i = 0; i < steps; ++i) {
    const FlowState k1 = rhs(G, Ut, y);
    FlowState y2{y.x + 0.5 * h * k1.x, y.t + 0.5 * h * k1.t, y.xi + 0.5 * h * k1.xi};
    const FlowState k2 = rhs(G, Ut, y2);
    FlowState y3{y.x + 0.5 * h * k2.x, y.t + 0.5 * h * k2.t, y.xi + 0.5 * h * k2.xi};
    const FlowState k3 = rhs(G, Ut, y3);
    FlowState y4{y.x + h * k3.x, y.t + h * k3.t, y.xi + h * k3.xi};
    const FlowState k4 = rhs(G, Ut, y4);
    y.x += h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    y.t += h / 6.0 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
    y.xi += h / 6.0 * (k1.xi + 2 * k2.xi + 2 * k3.xi + k4.xi);
    if (trace) trace->push_back({(i + 1) * h, y.x, y.t, y.xi});
  }
  return y;
}

}  // namespace

GroupPoint exp_map(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                   const Eigen::VectorXd& tauhat, int steps) {
  const FlowState y = integrate_flow(G, zeta, tauhat, steps, nullptr);
  return {y.x, y.t};
}

std::vector<FlowSample> exp_map_trajectory(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                                           const Eigen::VectorXd& tauhat, int steps) {
  std::vector<FlowSample> trace;
  integrate_flow(G, zeta, tauhat, steps, &trace);
  return trace;
}

bool theta_nonsingular(const StepTwoGroup& G, const Eigen::VectorXd& theta, double margin) {
  const SpectralData sd = spectral(G, theta);
  for (int i = 0; i < G.q; ++i) {
    const double b = std::sqrt(sd.beta[i]);
    const double nearest = std::round(b / kPi);
    if (nearest >= 1.0 && std::abs(b - nearest * kPi) < margin * std::max(1.0, b)) return false;
  }
  return true;
}

namespace {

// e^{-Ut(theta)} = cos - Ut * sinc, assembled from the spectral data of S.
Eigen::MatrixXd exp_neg_ut(const StepTwoGroup& G, const SpectralData& sd) {
  Eigen::VectorXd cosv(sd.beta.size());
  for (int i = 0; i < sd.beta.size(); ++i) cosv[i] = std::cos(std::sqrt(sd.beta[i]));
  const Eigen::MatrixXd C = sd.basis * cosv.asDiagonal() * sd.basis.transpose();
  const Eigen::MatrixXd S = apply_even(sinc_kernel(), sd);
  return C - G.u_tilde(sd.tau) * S;
}

double endpoint_gap(const GroupPoint& a, const GroupPoint& b) {
  return std::sqrt((a.x - b.x).squaredNorm() + (a.t - b.t).squaredNorm());
}

int steps_for(const StepTwoGroup& G, const Eigen::VectorXd& tauhat) {
  // RK4 global error ~ (||Ut|| / steps)^4 per unit arc; keep headroom for the
  // 1e-8 agreement checks.
  const double nu = std::sqrt(spectral(G, tauhat).max_beta());
  const int steps = static_cast<int>(std::ceil(96.0 * std::max(1.0, nu)));
  return std::clamp(steps, 256, 8192);
}

}  // namespace

Eigen::VectorXd x_component_closed_form(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                                        const Eigen::VectorXd& theta) {
  if (!theta_nonsingular(G, theta))
    throw SingularTheta("x_component_closed_form: theta lies on the singular set");
  const SpectralData sd = spectral(G, theta);
  return exp_neg_ut(G, sd) * (apply_even(sinc_kernel(), sd) * zeta);
}

std::optional<RecoveredGeodesic> recover_geodesic(const StepTwoGroup& G, const GroupPoint& g,
                                                  const Eigen::VectorXd& theta) {
  const Eigen::VectorXd tauhat = 2.0 * theta;
  const int steps = steps_for(G, tauhat);
  const double tol = 1e-8 * (1.0 + g.norm());

  auto finish = [&](const Eigen::VectorXd& zeta) -> std::optional<RecoveredGeodesic> {
    const GroupPoint end = exp_map(G, zeta, tauhat, steps);
    const double res = endpoint_gap(end, g);
    if (res > tol) return std::nullopt;
    RecoveredGeodesic out;
    out.covector = {zeta, tauhat};
    out.energy = zeta.squaredNorm();
    out.residual = res;
    return out;
  };

  const SpectralData sd = spectral(G, theta);
  const Eigen::MatrixXd M = exp_neg_ut(G, sd) * apply_even(sinc_kernel(), sd);

  if (theta_nonsingular(G, theta, 1e-6)) {
    const Eigen::VectorXd zeta = M.fullPivLu().solve(g.x);
    if (zeta.allFinite())
      if (auto rec = finish(zeta)) return rec;
  }

  // Singular (or failed) case: Gauss-Newton in zeta on the full endpoint
  // residual, multi-started around the least-squares seed.
  const Eigen::VectorXd seed_ls =
      M.completeOrthogonalDecomposition().pseudoInverse() * g.x;
  const double sigma = 1.0 + g.x.norm() + g.t.cwiseAbs().cwiseSqrt().sum();
  std::optional<RecoveredGeodesic> best;
  std::mt19937_64 rng(0xC0FFEEULL);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::VectorXd zeta = seed_ls;
    if (attempt > 0)
      for (int i = 0; i < G.q; ++i) zeta[i] += sigma * N(rng);
    double lambda = 1e-3;
    for (int iter = 0; iter < 80; ++iter) {
      const GroupPoint end = exp_map(G, zeta, tauhat, steps);
      Eigen::VectorXd r(G.q + G.m);
      r << end.x - g.x, end.t - g.t;
      if (r.norm() <= 0.3 * tol) break;
      Eigen::MatrixXd J(G.q + G.m, G.q);
      const double fd = 1e-6 * (1.0 + zeta.norm());
      for (int c = 0; c < G.q; ++c) {
        Eigen::VectorXd zp = zeta, zm = zeta;
        zp[c] += fd;
        zm[c] -= fd;
        const GroupPoint ep = exp_map(G, zp, tauhat, steps);
        const GroupPoint em = exp_map(G, zm, tauhat, steps);
        Eigen::VectorXd col(G.q + G.m);
        col << (ep.x - em.x) / (2 * fd), (ep.t - em.t) / (2 * fd);
        J.col(c) = col;
      }
      const Eigen::MatrixXd JtJ = J.transpose() * J;
      const Eigen::VectorXd Jtr = J.transpose() * r;
      bool stepped = false;
      for (int lm = 0; lm < 12; ++lm) {
        const Eigen::MatrixXd A =
            JtJ + lambda * Eigen::MatrixXd::Identity(G.q, G.q);
        const Eigen::VectorXd delta = A.ldlt().solve(-Jtr);
        const GroupPoint trial = exp_map(G, zeta + delta, tauhat, steps);
        Eigen::VectorXd rt(G.q + G.m);
        rt << trial.x - g.x, trial.t - g.t;
        if (rt.norm() < r.norm()) {
          zeta += delta;
          lambda = std::max(1e-10, lambda * 0.3);
          stepped = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) break;
    }
    if (auto rec = finish(zeta))
      if (!best || rec->energy < best->energy) best = rec;
  }
  return best;
}

namespace {

struct NewtonRootOutcome {
  Eigen::VectorXd z;  // concatenated (s, theta)
  bool converged = false;
  ReferenceEval eval;
};

NewtonRootOutcome newton_root(const StepTwoGroup& G, const GroupPoint& g, int k,
                              Eigen::VectorXd z, const SolverConfig& cfg) {
  const int q = G.q, m = G.m, dim = k * q + m;
  const double Z = omega_radius(k);
  NewtonRootOutcome out;

  auto margin_of = [&](const Eigen::VectorXd& zz) {
    return omega_margin(G, zz.tail(m), k);
  };
  auto eval_at = [&](const Eigen::VectorXd& zz) {
    const SegmentVector s = SegmentVector::unflatten(zz.head(k * q), k, q);
    return phi_k_star(G, g, s, zz.tail(m), k, EvalMode::Full);
  };

  if (margin_of(z) < 1e-6 * Z) return out;
  ReferenceEval ev = eval_at(z);
  Eigen::VectorXd F = ev.full_gradient(q, m);

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double scale = 1.0 + std::abs(ev.value);
    if (F.norm() <= 1e-9 * scale) {
      out.z = z;
      out.converged = true;
      out.eval = ev;
      return out;
    }
    Eigen::MatrixXd H = ev.hess;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
    Eigen::VectorXd d;
    if (lu.isInvertible()) {
      d = lu.solve(-F);
    } else {
      H += 1e-8 * std::max(1.0, H.norm()) * Eigen::MatrixXd::Identity(dim, dim);
      d = H.fullPivLu().solve(-F);
    }
    if (!d.allFinite()) return out;
    double alpha = 1.0;
    const double psi = F.squaredNorm();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd zt = z + alpha * d;
      if (margin_of(zt) > 1e-6 * Z) {
        const ReferenceEval et = eval_at(zt);
        const Eigen::VectorXd Ft = et.full_gradient(q, m);
        if (Ft.squaredNorm() <= (1.0 - 1e-4 * alpha) * psi) {
          z = zt;
          ev = et;
          F = Ft;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) return out;
  }
  return out;
}

}  // namespace

std::vector<CriticalPoint> critical_points(const StepTwoGroup& G, const GroupPoint& g, int k,
                                           const SolverConfig& cfg) {
  const int q = G.q, m = G.m, dim = k * q + m;
  const double Z = omega_radius(k);
  const int n_starts = 8 * dim + 4;

  std::vector<Eigen::VectorXd> starts;
  starts.reserve(n_starts);
  const double sigma =
      std::max(0.1, (g.x.norm() + g.t.cwiseAbs().cwiseSqrt().sum()) / std::sqrt(2.0 * k + 3.0));
  for (int r = 0; r < n_starts; ++r) {
    std::mt19937_64 rng(cfg.seed ^ (0x51d5c4c1b6ULL * (r + 1) + 977 * k));
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> Uni(0.05, 0.9);
    Eigen::VectorXd z(dim);
    for (int i = 0; i < k * q; ++i) z[i] = sigma * N(rng);
    Eigen::VectorXd dir(m);
    for (int i = 0; i < m; ++i) dir[i] = N(rng);
    const double nu = std::sqrt(spectral(G, dir).max_beta());
    z.tail(m) = (nu > 0) ? Eigen::VectorXd(dir * (Uni(rng) * Z / nu))
                         : Eigen::VectorXd::Zero(m);
    starts.push_back(z);
  }

  std::vector<NewtonRootOutcome> outcomes(starts.size());
  parallel_for(static_cast<int>(starts.size()),
               [&](int i) { outcomes[i] = newton_root(G, g, k, starts[i], cfg); });

  std::vector<CriticalPoint> found;
  for (const auto& o : outcomes) {
    if (!o.converged) continue;
    bool dup = false;
    for (const auto& c : found) {
      Eigen::VectorXd zc(dim);
      zc << c.s.flatten(), c.theta;
      if ((zc - o.z).norm() <= 1e-6 * (1.0 + zc.norm())) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    CriticalPoint cp;
    cp.s = SegmentVector::unflatten(o.z.head(k * q), k, q);
    cp.theta = o.z.tail(m);
    cp.value = o.eval.value;
    cp.grad_norm = o.eval.full_gradient(q, m).norm();
    cp.hess_det = o.eval.hess.determinant();
    cp.hess_norm = o.eval.hess.operatorNorm();
    found.push_back(cp);
  }
  std::sort(found.begin(), found.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  return found;
}

std::vector<GeodesicRecord> solve_geodesics(const StepTwoGroup& G, const GroupPoint& g, int k,
                                            const SolverConfig& cfg) {
  if (g.x.size() != G.q || g.t.size() != G.m)
    throw DimensionMismatch("solve_geodesics: point dimensions");
  const std::vector<CriticalPoint> crits = critical_points(G, g, k, cfg);
  std::vector<GeodesicRecord> records;
  for (const auto& cp : crits) {
    const auto rec = recover_geodesic(G, g, cp.theta);
    if (!rec) continue;
    bool dup = false;
    for (const auto& r : records) {
      const double dz = (r.covector.zeta - rec->covector.zeta).norm() +
                        (r.covector.tau - rec->covector.tau).norm();
      if (dz <= 1e-6 * (1.0 + rec->covector.zeta.norm() + rec->covector.tau.norm())) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    GeodesicRecord out;
    out.covector = rec->covector;
    out.energy = rec->energy;
    out.endpoint = exp_map(G, rec->covector.zeta, rec->covector.tau,
                           steps_for(G, rec->covector.tau));
    out.endpoint_residual = endpoint_gap(out.endpoint, g);
    out.source_level = k;
    records.push_back(out);
  }
  std::sort(records.begin(), records.end(),
            [](const GeodesicRecord& a, const GeodesicRecord& b) { return a.energy < b.energy; });
  return records;
}

const char* to_string(CutVerdict v) {
  switch (v) {
    case CutVerdict::NotCut: return "not_cut";
    case CutVerdict::Cut: return "cut";
    default: return "unknown";
  }
}

CutLocusVerdict cut_locus_test(const StepTwoGroup& G, const GroupPoint& g,
                               const SolverConfig& cfg) {
  CutLocusVerdict out;
  if (g.norm() <= 1e-14) {
    out.note = "identity point excluded (verdict defined for g != o)";
    return out;
  }
  out.certificate = distance(G, g, cfg);
  if (!out.certificate.attained) {
    out.note = "distance not certified within the level cap";
    return out;
  }
  const double d2 = out.certificate.d2;
  const int k_test = out.certificate.k_used + 1;
  const std::vector<CriticalPoint> crits = critical_points(G, g, k_test, cfg);
  out.critical_count = static_cast<int>(crits.size());
  if (crits.empty()) {
    out.note = "no critical points located at level " + std::to_string(k_test);
    return out;
  }
  const double vtol = 1e-8 * (1.0 + std::abs(d2));
  int minimizing = 0;
  double min_det_scaled = std::numeric_limits<double>::infinity();
  const int dim = k_test * G.q + G.m;
  for (const auto& cp : crits) {
    if (std::abs(cp.value - d2) <= 1e4 * vtol) {
      ++minimizing;
      const double denom = std::pow(std::max(cp.hess_norm, 1e-300), dim);
      min_det_scaled = std::min(min_det_scaled, std::abs(cp.hess_det) / denom);
    }
  }
  out.minimizing_count = minimizing;
  out.min_abs_det_scaled = std::isfinite(min_det_scaled) ? min_det_scaled : 0.0;

  if (minimizing >= 2) {
    out.verdict = CutVerdict::Cut;
    out.classical_cut = true;
    out.note = "multiple minimizing critical points";
    return out;
  }
  if (minimizing == 0) {
    out.note = "no critical point attains the certified distance";
    return out;
  }
  if (static_cast<int>(crits.size()) > 1) {
    out.verdict = CutVerdict::Cut;
    out.note = "extra non-minimizing critical points at the test level";
    return out;
  }
  if (out.min_abs_det_scaled < 1e-10) {
    out.verdict = CutVerdict::Cut;
    out.note = "degenerate Hessian at the unique critical point";
    return out;
  }
  out.verdict = CutVerdict::NotCut;
  out.note = "unique nondegenerate minimizing critical point";
  return out;
}

GmClassification classify_gm(const StepTwoGroup& G, int n_samples, std::uint64_t seed,
                             const SolverConfig& cfg) {
  GmClassification out;
  out.samples = n_samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-1.5, 1.5);
  SolverConfig ev_cfg = cfg;
  ev_cfg.max_k = 2;
  const int evidence_cap = 10;
  for (int i = 0; i < n_samples; ++i) {
    GroupPoint g{Eigen::VectorXd(G.q), Eigen::VectorXd(G.m)};
    for (int j = 0; j < G.q; ++j) g.x[j] = box(rng);
    for (int j = 0; j < G.m; ++j) g.t[j] = box(rng);
    const InnerResult ir = inner_sup(G, g, SegmentVector::zeros(0, G.q), 0, cfg);
    bool in_m = false;
    if (ir.status == InnerStatus::Interior) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-ir.hess_tau);
      const double hscale = std::max(1e-12, ir.hess_tau.norm());
      in_m = es.eigenvalues()[0] >= 1e-8 * hscale;
    }
    if (in_m) {
      ++out.in_m_count;
    } else if (static_cast<int>(out.evidence.size()) < evidence_cap) {
      // A boundary supremum alone is not evidence; require the certified
      // value at a higher level to exceed the level-0 supremum.
      const DistanceCertificate cert = distance(G, g, ev_cfg);
      const double sup0 = cert.level_values.empty() ? ir.value : cert.level_values[0];
      const double scale = point_scale(g);
      if (cert.attained && cert.k_used >= 1 && cert.d2 > sup0 + 1e-3 * scale)
        out.evidence.push_back(g);
    }
  }
  out.fraction = n_samples > 0 ? static_cast<double>(out.in_m_count) / n_samples : 0.0;
  return out;
}

}  // namespace ccdist
