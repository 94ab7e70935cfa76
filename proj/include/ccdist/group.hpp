// ccdist -- step-two Carnot groups: group data, group law, dilations, fixtures.
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ccdist/errors.hpp"

namespace ccdist {

// A step-two Carnot group R^q x R^m defined by an m-tuple of linearly
// independent skew-symmetric q x q matrices. Immutable after construction.
struct StepTwoGroup {
  int q = 0;
  int m = 0;
  std::vector<Eigen::MatrixXd> U;

  // Sum_j tau_j U^(j).
  Eigen::MatrixXd u_tilde(const Eigen::VectorXd& tau) const;

  // Componentwise bilinear pairing: pairing(a, b)_j = a^T U^(j) b.
  Eigen::VectorXd pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

struct GroupPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd t;

  double norm() const { return std::sqrt(x.squaredNorm() + t.squaredNorm()); }
};

struct Covector {
  Eigen::VectorXd zeta;
  Eigen::VectorXd tau;
};

// Checks skew-symmetry (exactly as stored) and linear independence of the
// stacked m x q^2 matrix (singular-value threshold 1e-10 relative).
StepTwoGroup validate_group(const std::vector<Eigen::MatrixXd>& matrices);

GroupPoint identity(const StepTwoGroup& G);
GroupPoint multiply(const StepTwoGroup& G, const GroupPoint& a, const GroupPoint& b);
GroupPoint inverse(const GroupPoint& g);
GroupPoint dilate(const GroupPoint& g, double r);

// Named fixtures: heisenberg(n), htype(q,m), corank1(q), n32, kolmogorov(q).
StepTwoGroup builtin_group(const std::string& name);

// 1 + |x|^2 + sum_j |t_j|; the scale used by scale-relative tolerances.
double point_scale(const GroupPoint& g);

}  // namespace ccdist
