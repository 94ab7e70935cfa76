#include "ccdist/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "ccdist/geodesics.hpp"
#include "ccdist/parallel.hpp"

namespace ccdist {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

GroupPoint integrate_controls(const StepTwoGroup& G, const std::vector<Eigen::VectorXd>& u) {
  if (u.empty()) throw DimensionMismatch("integrate_controls: need at least one segment");
  const int N = static_cast<int>(u.size());
  GroupPoint g = identity(G);
  for (const auto& ui : u) {
    if (ui.size() != G.q) throw DimensionMismatch("integrate_controls: control dimension != q");
    // A constant-control segment is exactly a right translation by (u/N, 0).
    g = multiply(G, g, {ui / N, Eigen::VectorXd::Zero(G.m)});
  }
  return g;
}

namespace {

struct PenaltyObjective {
  const StepTwoGroup& G;
  const GroupPoint& target;
  int N;
  double rho;

  // Endpoint in closed form: x = (1/N) sum u_i,
  // t_j = (1/2N^2) sum_{l<i} u_l^T U^(j) u_i.
  void endpoint(const Eigen::VectorXd& flat, Eigen::VectorXd& x, Eigen::VectorXd& t) const {
    const int q = G.q;
    x = Eigen::VectorXd::Zero(q);
    t = Eigen::VectorXd::Zero(G.m);
    Eigen::VectorXd prefix = Eigen::VectorXd::Zero(q);  // sum of u_l, l < i
    for (int i = 0; i < N; ++i) {
      const auto ui = flat.segment(i * q, q);
      x += ui;
      for (int j = 0; j < G.m; ++j) t[j] += prefix.dot(G.U[j] * ui);
      prefix += ui;
    }
    x /= N;
    t /= 2.0 * N * N;
  }

  double value_grad(const Eigen::VectorXd& flat, Eigen::VectorXd& grad) const {
    const int q = G.q;
    Eigen::VectorXd x, t;
    endpoint(flat, x, t);
    const Eigen::VectorXd rx = x - target.x;
    const Eigen::VectorXd rt = t - target.t;
    const double energy = flat.squaredNorm() / N;
    const double val = energy + rho * (rx.squaredNorm() + rt.squaredNorm());

    grad = 2.0 * flat / N;
    // d x / d u_i = I/N; d t_j / d u_p = U^(j)(suffix - prefix)/(2N^2).
    Eigen::VectorXd total = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < N; ++i) total += flat.segment(i * q, q);
    Eigen::VectorXd prefix = Eigen::VectorXd::Zero(q);
    for (int p = 0; p < N; ++p) {
      const auto up = flat.segment(p * q, q);
      const Eigen::VectorXd suffix = total - prefix - up;
      Eigen::VectorXd gp = 2.0 * rho * rx / N;
      for (int j = 0; j < G.m; ++j)
        gp += (2.0 * rho * rt[j] / (2.0 * N * N)) *
              (G.U[j] * suffix - G.U[j].transpose() * prefix);
      grad.segment(p * q, q) += gp;
      prefix += up;
    }
    return val;
  }
};

// Limited-memory BFGS with backtracking; the direct oracle lives in a few
// hundred dimensions, so the two-loop recursion keeps stages cheap.
double bfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
                     Eigen::VectorXd& x, int max_iter, double gtol) {
  const int n = static_cast<int>(x.size());
  const int memory = 10;
  std::vector<Eigen::VectorXd> S, Y;
  std::vector<double> rho;
  Eigen::VectorXd g(n);
  double f = fg(x, g);
  double gamma = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (g.norm() <= gtol * (1.0 + std::abs(f))) break;
    // Two-loop recursion for d = -H g.
    Eigen::VectorXd d = g;
    std::vector<double> alpha_hist(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha_hist[i] = rho[i] * S[i].dot(d);
      d -= alpha_hist[i] * Y[i];
    }
    d *= gamma;
    for (size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(d);
      d += (alpha_hist[i] - beta) * S[i];
    }
    d = -d;
    if (!d.allFinite() || d.dot(g) >= 0) d = -g;

    double alpha = 1.0;
    const double slope = g.dot(d);
    Eigen::VectorXd gn(n);
    double fn = f;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      fn = fg(x + alpha * d, gn);
      if (fn <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd s = alpha * d;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > memory) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho.erase(rho.begin());
      }
      gamma = sy / y.squaredNorm();
    }
    x += s;
    f = fn;
    g = gn;
  }
  return f;
}

}  // namespace

DirectResult direct_distance(const StepTwoGroup& G, const GroupPoint& g, int N, int restarts,
                             std::uint64_t seed) {
  if (N < 8) throw Error("direct_distance: N must be >= 8");
  const int q = G.q;
  const int dim = N * q;
  const double scale = 1.0 + g.norm();

  std::vector<Eigen::VectorXd> starts;
  {
    // Straight-line seed plus random perturbed seeds.
    Eigen::VectorXd straight(dim);
    for (int i = 0; i < N; ++i) straight.segment(i * q, q) = g.x;
    starts.push_back(straight);
    const double amp = g.x.norm() + 2.0 * g.t.cwiseAbs().cwiseSqrt().sum() + 0.5;
    for (int r = 1; r < std::max(1, restarts); ++r) {
      std::mt19937_64 rng(seed ^ (0xABCDEF12345ULL * r));
      std::normal_distribution<double> Nd(0.0, amp);
      Eigen::VectorXd u = straight;
      for (int i = 0; i < dim; ++i) u[i] += Nd(rng);
      starts.push_back(u);
    }
  }

  struct Candidate {
    double energy = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u;
    double feas = std::numeric_limits<double>::infinity();
  };
  std::vector<Candidate> cands(starts.size());

  parallel_for(static_cast<int>(starts.size()), [&](int si) {
    Eigen::VectorXd u = starts[si];
    double rho = 100.0 * scale;
    for (int stage = 0; stage < 6; ++stage) {
      PenaltyObjective obj{G, g, N, rho};
      auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        return obj.value_grad(v, grad);
      };
      bfgs_minimize(fg, u, 400, 1e-10);
      rho *= 10.0;
    }
    PenaltyObjective probe{G, g, N, 0.0};
    Eigen::VectorXd x, t;
    probe.endpoint(u, x, t);
    cands[si].u = u;
    cands[si].energy = u.squaredNorm() / N;
    cands[si].feas = std::sqrt((x - g.x).squaredNorm() + (t - g.t).squaredNorm());
  });

  DirectResult out;
  int best = -1;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].feas > 1e-5 * scale) continue;  // infeasible run
    if (best < 0 || cands[i].energy < cands[best].energy) best = static_cast<int>(i);
  }
  if (best < 0) {
    // Keep the most feasible run and flag non-convergence.
    best = 0;
    for (size_t i = 1; i < cands.size(); ++i)
      if (cands[i].feas < cands[best].feas) best = static_cast<int>(i);
    out.converged = false;
  } else {
    out.converged = cands[best].feas <= 1e-6 * scale;
  }
  out.energy = cands[best].energy;
  out.feasibility = cands[best].feas;
  out.path.N = N;
  for (int i = 0; i < N; ++i) out.path.u.push_back(cands[best].u.segment(i * q, q));
  out.path.endpoint = integrate_controls(G, out.path.u);
  out.path.energy = out.energy;
  return out;
}

std::optional<ShootingResult> shooting_distance(const StepTwoGroup& G, const GroupPoint& g,
                                                int restarts, std::uint64_t seed) {
  if (g.norm() <= 1e-14) throw Error("shooting_distance: g must differ from the identity");
  const int q = G.q, m = G.m;
  const double tol = 1e-6 * (1.0 + g.norm());
  const double amp_z = g.x.norm() + 2.0 * g.t.cwiseAbs().cwiseSqrt().sum() + 0.5;

  struct Sol {
    double energy;
    Covector cov;
    double residual;
  };
  std::vector<std::optional<Sol>> sols(std::max(1, restarts));

  parallel_for(static_cast<int>(sols.size()), [&](int si) {
    std::mt19937_64 rng(seed ^ (0x5DEECE66DULL * (si + 1)));
    std::normal_distribution<double> Nd(0.0, 1.0);
    Eigen::VectorXd zeta(q), tauhat(m);
    for (int i = 0; i < q; ++i) zeta[i] = amp_z * Nd(rng);
    for (int i = 0; i < m; ++i) tauhat[i] = 2.0 * Nd(rng);
    if (si == 0) {
      zeta = g.x;
      tauhat.setZero();
    }

    double lambda = 1e-3;
    const int dim = q + m;
    for (int iter = 0; iter < 120; ++iter) {
      const int steps = 256;
      const GroupPoint end = exp_map(G, zeta, tauhat, steps);
      Eigen::VectorXd r(q + m);
      r << end.x - g.x, end.t - g.t;
      if (r.norm() <= 0.3 * tol) break;
      Eigen::MatrixXd J(q + m, dim);
      const double fdz = 1e-6 * (1.0 + zeta.norm());
      const double fdt = 1e-6 * (1.0 + tauhat.norm());
      for (int c = 0; c < dim; ++c) {
        Eigen::VectorXd zp = zeta, zm = zeta, tp = tauhat, tm = tauhat;
        if (c < q) {
          zp[c] += fdz;
          zm[c] -= fdz;
        } else {
          tp[c - q] += fdt;
          tm[c - q] -= fdt;
        }
        const GroupPoint ep = exp_map(G, zp, tp, steps);
        const GroupPoint em = exp_map(G, zm, tm, steps);
        Eigen::VectorXd col(q + m);
        col << (ep.x - em.x), (ep.t - em.t);
        col /= (c < q ? 2 * fdz : 2 * fdt);
        J.col(c) = col;
      }
      const Eigen::MatrixXd JtJ = J.transpose() * J;
      const Eigen::VectorXd Jtr = J.transpose() * r;
      bool stepped = false;
      for (int lm = 0; lm < 12; ++lm) {
        const Eigen::MatrixXd A = JtJ + lambda * Eigen::MatrixXd::Identity(dim, dim);
        const Eigen::VectorXd delta = A.ldlt().solve(-Jtr);
        const GroupPoint trial = exp_map(G, zeta + delta.head(q), tauhat + delta.tail(m), steps);
        Eigen::VectorXd rt(q + m);
        rt << trial.x - g.x, trial.t - g.t;
        if (rt.norm() < r.norm()) {
          zeta += delta.head(q);
          tauhat += delta.tail(m);
          lambda = std::max(1e-10, lambda * 0.3);
          stepped = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) break;
    }
    const GroupPoint end = exp_map(G, zeta, tauhat, 1024);
    const double res = std::sqrt((end.x - g.x).squaredNorm() + (end.t - g.t).squaredNorm());
    if (res <= tol) sols[si] = Sol{zeta.squaredNorm(), {zeta, tauhat}, res};
  });

  std::optional<ShootingResult> out;
  int count = 0;
  for (const auto& s : sols) {
    if (!s) continue;
    ++count;
    if (!out || s->energy < out->energy) {
      ShootingResult r;
      r.energy = s->energy;
      r.covector = s->cov;
      r.residual = s->residual;
      out = r;
    }
  }
  if (out) out->solutions_found = count;
  return out;
}

double heisenberg_closed_form(const Eigen::VectorXd& x, double t) {
  const double x2 = x.squaredNorm();
  if (x2 == 0.0) return 4.0 * kPi * std::abs(t);
  if (t == 0.0) return x2;
  // Solve mu(theta) = 4 t / |x|^2 on (-pi, pi); mu is odd and increasing.
  const double rhs = 4.0 * t / x2;
  auto mu = [](double s) {
    if (std::abs(s) < 1e-6) return 2.0 * s / 3.0 + 2.0 * s * s * s / 15.0;
    const double sn = std::sin(s);
    return (2.0 * s - std::sin(2.0 * s)) / (2.0 * sn * sn);
  };
  double lo = 0.0, hi = kPi;
  if (rhs < 0) {
    lo = -kPi;
    hi = 0.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mu(mid) < rhs)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  const double ratio = std::abs(theta) < 1e-9 ? 1.0 : theta / std::sin(theta);
  return ratio * ratio * x2;
}

}  // namespace ccdist
