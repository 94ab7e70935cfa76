// ccdist -- independent brute-force distance estimators used to cross-check
// the minimax engine: direct control discretization with penalty continuation,
// covector shooting, and the closed form on the first Heisenberg group.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccdist/group.hpp"

namespace ccdist {

struct ControlPath {
  int N = 0;
  std::vector<Eigen::VectorXd> u;  // piecewise-constant controls on [0,1]
  GroupPoint endpoint;
  double energy = 0.0;  // (1/N) sum |u_i|^2
};

// Chains the exact per-segment endpoints under the group law.
GroupPoint integrate_controls(const StepTwoGroup& G, const std::vector<Eigen::VectorXd>& u);

struct DirectResult {
  double energy = 0.0;
  ControlPath path;
  double feasibility = 0.0;  // endpoint residual of the best path
  bool converged = false;
};

// Minimizes path energy subject to endpoint = g by quadratic-penalty
// continuation with BFGS inner solves; multi-start.
DirectResult direct_distance(const StepTwoGroup& G, const GroupPoint& g, int N, int restarts,
                             std::uint64_t seed);

struct ShootingResult {
  double energy = 0.0;  // minimal |zeta|^2 over verified solutions
  Covector covector;
  double residual = 0.0;
  int solutions_found = 0;
};

// Least-squares shooting on exp(zeta, tauhat) = g over multi-started covectors.
std::optional<ShootingResult> shooting_distance(const StepTwoGroup& G, const GroupPoint& g,
                                                int restarts, std::uint64_t seed);

// Exact squared distance on heisenberg(1), via the monotone stationarity
// equation; x may have any even dimension paired into symplectic blocks.
double heisenberg_closed_form(const Eigen::VectorXd& x, double t);

}  // namespace ccdist
