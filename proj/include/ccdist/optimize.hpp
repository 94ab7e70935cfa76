// ccdist -- the distance engine: concave maximization over the reference set,
// outer minimization over segment vectors, and the level-iteration algorithm
// that certifies the squared Carnot-Caratheodory distance.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ccdist/group.hpp"
#include "ccdist/reference.hpp"

namespace ccdist {

struct SolverConfig {
  int max_k = 8;
  double tol_grad = 1e-10;     // inner gradient tolerance, scale-relative
  double tol_boundary = 1e-6;  // boundary margin threshold, fraction of the set radius
  int restarts = 16;
  std::uint64_t seed = 12345;
  int max_iter = 200;
  // Accept a level whose value agrees with the previous one to this relative
  // tolerance even when the inner maximizer sits on the boundary (successive
  // equal levels certify the distance).
  bool accept_stabilized = true;
  double stabilize_rel = 1e-8;
};

enum class InnerStatus { Interior, Boundary, MaxIter };

const char* to_string(InnerStatus s);

struct InnerResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  InnerStatus status = InnerStatus::MaxIter;
  int iterations = 0;
  double grad_norm = 0.0;
  double margin = 0.0;
  Eigen::MatrixXd hess_tau;
};

struct TauEvaluation {
  double value;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double margin;
};
using TauObjective = std::function<TauEvaluation(const Eigen::VectorXd&)>;

// Damped Newton ascent with a fraction-to-boundary rule, started at tau = 0.
InnerResult maximize_concave(int m, const TauObjective& f, double omega_radius,
                             const SolverConfig& cfg);

// sup over tau of Phi_k(g; s, tau).
InnerResult inner_sup(const StepTwoGroup& G, const GroupPoint& g, const SegmentVector& s, int k,
                      const SolverConfig& cfg);

// sup over tau of phi_k((X,T); tau).
InnerResult sup_phi_k(const StepTwoGroup& G, const Eigen::VectorXd& X, const Eigen::VectorXd& T,
                      int k, const SolverConfig& cfg);

struct OuterResult {
  SegmentVector s_star;
  Eigen::VectorXd theta_star;
  double value = 0.0;
  bool attained = false;
  InnerStatus inner_status = InnerStatus::MaxIter;
  double outer_grad_norm = 0.0;
  int iterations = 0;
  double restart_spread = 0.0;  // max-min of final values across restarts
};

OuterResult outer_inf(const StepTwoGroup& G, const GroupPoint& g, int k, const SolverConfig& cfg,
                      const std::vector<SegmentVector>* warm_starts = nullptr);

struct DistanceCertificate {
  double d2 = 0.0;
  int k_used = 0;
  SegmentVector s_star;
  Eigen::VectorXd theta_star;
  bool attained = false;
  bool stabilized = false;  // certified by successive-level agreement
  double lower = 0.0;
  double upper = 0.0;  // geodesic energy; +inf when no geodesic was recovered
  std::optional<Covector> covector;
  std::vector<double> level_values;
  std::vector<InnerStatus> level_status;
  int iterations = 0;
  double restart_spread = 0.0;
};

DistanceCertificate distance(const StepTwoGroup& G, const GroupPoint& g, const SolverConfig& cfg);

// Levels 0..k_max in order, each warm-started by lifting the previous
// solution, regardless of attainment.
std::vector<OuterResult> level_sweep(const StepTwoGroup& G, const GroupPoint& g, int k_max,
                                     const SolverConfig& cfg);

double lower_bound(const StepTwoGroup& G, const GroupPoint& g, int k, const SolverConfig& cfg);

// Tests F_k(x,t,s) for membership in the level-k set of interior nondegenerate
// maximizers; on success the sup value bounds d(g)^2 from above.
std::optional<double> upper_bound_if_in_Mk(const StepTwoGroup& G, const GroupPoint& g,
                                           const SegmentVector& s, int k,
                                           const SolverConfig& cfg);

struct MinimaxResidual {
  bool unbounded = false;   // inf over the appended block is -inf
  double inf_value = 0.0;   // inf_{s_{k+1}} Phi_{k+1}(g; (s, s_{k+1}), tau)
  double base_value = 0.0;  // Phi_k(g; s, tau)
  double rel_error = 0.0;
};

// Verifies, at one tau, that appending a block and minimizing reproduces the
// level-k objective (or diverges when tau lies beyond the level-k closure).
MinimaxResidual minimax_residual_at(const StepTwoGroup& G, const GroupPoint& g,
                                    const SegmentVector& s, int k, const Eigen::VectorXd& tau);

struct MinimaxReport {
  double max_rel_error_inside = 0.0;
  int inside_checked = 0;
  int outside_checked = 0;
  bool all_outside_unbounded = true;
};

MinimaxReport minimax_residual_check(const StepTwoGroup& G, const GroupPoint& g,
                                     const SegmentVector& s_star,
                                     const Eigen::VectorXd& theta_star, int k,
                                     const SolverConfig& cfg);

}  // namespace ccdist
