// ccdist -- reference sets and reference objectives.
//
// Level k = 0 uses phi(g; tau) = <U(tau) cot U(tau) x, x> + 4 t.tau on the
// set where ||U(tau)|| < pi. Level k >= 1 lifts through the map F_k and the
// kernel R_k, on ||U(tau)|| < zero(k,1). The full objective
//   Phi_k(g; s, tau) = |x|^2 + sum_j 2(2j+1)|s_j|^2 + phi_k(F_k(x,t,s); tau)
// is quadratic in s for fixed tau and concave in tau for fixed s.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "ccdist/group.hpp"
#include "ccdist/matfun.hpp"

namespace ccdist {

struct SegmentVector {
  int k = 0;
  std::vector<Eigen::VectorXd> s;  // k vectors in R^q

  static SegmentVector zeros(int k, int q);
  Eigen::VectorXd flatten() const;
  static SegmentVector unflatten(const Eigen::VectorXd& v, int k, int q);
};

// zero(k,1) - ||U(tau)||; positive iff tau is inside the level-k reference set.
double omega_margin(const StepTwoGroup& G, const Eigen::VectorXd& tau, int k);
double omega_radius(int k);  // zero(k,1)

double phi(const StepTwoGroup& G, const GroupPoint& g, const Eigen::VectorXd& tau);

// F_k(x, t, s) = (s_k, t + (1/sqrt2) <Ux, s_1> + sum_{j>=2} <U s_{j-1}, s_j>).
std::pair<Eigen::VectorXd, Eigen::VectorXd> f_k_map(const StepTwoGroup& G,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& t,
                                                    const SegmentVector& s);

double phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X, const Eigen::VectorXd& T,
             const Eigen::VectorXd& tau, int k);

enum class EvalMode { ValueOnly, TauBlock, Full };

// Evaluation of Phi_k(g; s, tau) (or of phi_k((X,T); tau) via eval_phi_k).
// Hessian layout: [s_1 | ... | s_k | tau], dimension k*q + m.
struct ReferenceEval {
  double value = 0.0;
  Eigen::VectorXd grad_tau;
  std::vector<Eigen::VectorXd> grad_s;
  Eigen::MatrixXd hess_tau;  // tau-tau block
  Eigen::MatrixXd hess;      // full (k q + m)^2, EvalMode::Full only
  double boundary_margin = 0.0;
  bool near_boundary = false;

  Eigen::VectorXd full_gradient(int q, int m) const;
};

ReferenceEval phi_k_star(const StepTwoGroup& G, const GroupPoint& g, const SegmentVector& s,
                         const Eigen::VectorXd& tau, int k, EvalMode mode = EvalMode::Full);

// phi_k((X,T); tau) with tau-derivatives (the (X,T)-level objective used by
// the membership test and the kernel asymptotics).
ReferenceEval eval_phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X,
                         const Eigen::VectorXd& T, const Eigen::VectorXd& tau, int k,
                         EvalMode mode = EvalMode::TauBlock);

}  // namespace ccdist
