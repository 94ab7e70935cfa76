// ccdist -- normal geodesics, the exponential map, cut-locus verdicts, and a
// sampled classifier for groups whose distance is certified at level zero.
//
// Convention: endpoint = exp(zeta, tauhat) with tauhat = 2 theta; critical
// points of Phi_k(g; ., .) with theta inside the level-k reference set are in
// bijection with geodesics from the identity to g.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccdist/optimize.hpp"

namespace ccdist {

// Endpoint of the normal geodesic from the identity with initial covector
// (zeta, tauhat), by fixed-step RK4 on the Hamiltonian system.
GroupPoint exp_map(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                   const Eigen::VectorXd& tauhat, int steps = 256);

struct FlowSample {
  double sigma;
  Eigen::VectorXd x, t, xi;
};

// Full trajectory of the flow, one sample per step (plus the start).
std::vector<FlowSample> exp_map_trajectory(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                                           const Eigen::VectorXd& tauhat, int steps = 256);

// Closed-form x-component of exp(zeta, 2 theta); requires theta away from the
// singular set (no singular value of Ut(theta) at a nonzero multiple of pi).
Eigen::VectorXd x_component_closed_form(const StepTwoGroup& G, const Eigen::VectorXd& zeta,
                                        const Eigen::VectorXd& theta);

// True when no singular value of Ut(theta) is within `margin` of a nonzero
// multiple of pi (relative to max(1, value)).
bool theta_nonsingular(const StepTwoGroup& G, const Eigen::VectorXd& theta,
                       double margin = 1e-10);

struct RecoveredGeodesic {
  Covector covector;  // tau component equals 2 theta
  double energy = 0.0;
  double residual = 0.0;
};

// Given theta, solves exp(zeta, 2 theta) = g for zeta: a linear solve when
// theta is nonsingular, otherwise damped Gauss-Newton on the endpoint residual.
std::optional<RecoveredGeodesic> recover_geodesic(const StepTwoGroup& G, const GroupPoint& g,
                                                  const Eigen::VectorXd& theta);

struct GeodesicRecord {
  Covector covector;
  double energy = 0.0;
  GroupPoint endpoint;
  double endpoint_residual = 0.0;
  int source_level = -1;  // -1 when produced by shooting
};

struct CriticalPoint {
  SegmentVector s;
  Eigen::VectorXd theta;
  double value = 0.0;
  double grad_norm = 0.0;
  double hess_det = 0.0;
  double hess_norm = 0.0;
};

// Multi-start Newton root-finding on the full gradient of Phi_k(g; ., .).
std::vector<CriticalPoint> critical_points(const StepTwoGroup& G, const GroupPoint& g, int k,
                                           const SolverConfig& cfg);

// Critical points mapped to verified geodesics, deduplicated by covector.
std::vector<GeodesicRecord> solve_geodesics(const StepTwoGroup& G, const GroupPoint& g, int k,
                                            const SolverConfig& cfg);

enum class CutVerdict { NotCut, Cut, Unknown };

const char* to_string(CutVerdict v);

struct CutLocusVerdict {
  CutVerdict verdict = CutVerdict::Unknown;
  bool classical_cut = false;  // at least two minimizing critical points
  int critical_count = 0;
  int minimizing_count = 0;
  double min_abs_det_scaled = 0.0;  // |det Hess| / ||Hess||^dim at the minimizer
  std::string note;
  DistanceCertificate certificate;
};

CutLocusVerdict cut_locus_test(const StepTwoGroup& G, const GroupPoint& g,
                               const SolverConfig& cfg);

struct GmClassification {
  int samples = 0;
  int in_m_count = 0;
  double fraction = 0.0;
  std::vector<GroupPoint> evidence;  // sampled points where level 0 provably undershoots
};

// Samples points from a box and tests for an interior nondegenerate maximizer
// of the level-0 reference function. Heuristic, not a decision procedure.
GmClassification classify_gm(const StepTwoGroup& G, int n_samples, std::uint64_t seed,
                             const SolverConfig& cfg);

}  // namespace ccdist
