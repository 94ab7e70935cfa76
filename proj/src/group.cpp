#include "ccdist/group.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cctype>
#include <cmath>

namespace ccdist {

Eigen::MatrixXd StepTwoGroup::u_tilde(const Eigen::VectorXd& tau) const {
  if (tau.size() != m) throw DimensionMismatch("u_tilde: tau has wrong dimension");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q, q);
  for (int j = 0; j < m; ++j) out += tau[j] * U[j];
  return out;
}

Eigen::VectorXd StepTwoGroup::pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (a.size() != q || b.size() != q) throw DimensionMismatch("pairing: vector dimension != q");
  Eigen::VectorXd out(m);
  for (int j = 0; j < m; ++j) out[j] = a.dot(U[j] * b);
  return out;
}

StepTwoGroup validate_group(const std::vector<Eigen::MatrixXd>& matrices) {
  if (matrices.empty()) throw DimensionMismatch("validate_group: empty matrix list");
  const int q = static_cast<int>(matrices[0].rows());
  const int m = static_cast<int>(matrices.size());
  for (int j = 0; j < m; ++j) {
    const auto& M = matrices[j];
    if (M.rows() != q || M.cols() != q)
      throw DimensionMismatch("validate_group: matrix " + std::to_string(j) + " is not " +
                              std::to_string(q) + "x" + std::to_string(q));
    if (M != -M.transpose()) throw NotSkewSymmetric(j);
  }
  // Independence of the stacked m x q^2 matrix via singular values.
  Eigen::MatrixXd stack(m, q * q);
  for (int j = 0; j < m; ++j)
    stack.row(j) = Eigen::Map<const Eigen::VectorXd>(matrices[j].data(), q * q).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] <= 1e-10 * sv[0]) throw LinearlyDependent();

  StepTwoGroup G;
  G.q = q;
  G.m = m;
  G.U = matrices;
  return G;
}

GroupPoint identity(const StepTwoGroup& G) {
  return {Eigen::VectorXd::Zero(G.q), Eigen::VectorXd::Zero(G.m)};
}

GroupPoint multiply(const StepTwoGroup& G, const GroupPoint& a, const GroupPoint& b) {
  if (a.x.size() != G.q || b.x.size() != G.q || a.t.size() != G.m || b.t.size() != G.m)
    throw DimensionMismatch("multiply: point dimension mismatch");
  GroupPoint out;
  out.x = a.x + b.x;
  out.t = a.t + b.t + 0.5 * G.pairing(a.x, b.x);
  return out;
}

GroupPoint inverse(const GroupPoint& g) { return {-g.x, -g.t}; }

GroupPoint dilate(const GroupPoint& g, double r) {
  if (!(r > 0.0)) throw NonPositiveScale();
  return {r * g.x, r * r * g.t};
}

double point_scale(const GroupPoint& g) {
  return 1.0 + g.x.squaredNorm() + g.t.cwiseAbs().sum();
}

namespace {

Eigen::MatrixXd symplectic_block(int q, double scale_first = 1.0, bool ladder = false) {
  // Block-diagonal rotation generators; ladder=true uses weights 1,2,3,... per block.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(q, q);
  int block = 0;
  for (int i = 0; i + 1 < q; i += 2) {
    const double w = ladder ? scale_first * (block + 1) : scale_first;
    M(i, i + 1) = w;
    M(i + 1, i) = -w;
    ++block;
  }
  return M;
}

// Left-multiplication matrices of i, j, k on the quaternions (basis 1,i,j,k).
// Skew, anticommuting, squaring to -I.
std::vector<Eigen::MatrixXd> quaternion_units() {
  Eigen::MatrixXd Li(4, 4), Lj(4, 4), Lk(4, 4);
  Li << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  Lj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  Lk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  return {Li, Lj, Lk};
}

struct FixtureName {
  std::string base;
  std::vector<int> args;
};

FixtureName parse_fixture(const std::string& name) {
  FixtureName out;
  auto open = name.find('(');
  if (open == std::string::npos) {
    out.base = name;
    return out;
  }
  if (name.back() != ')') throw UnknownFixture(name);
  out.base = name.substr(0, open);
  std::string inner = name.substr(open + 1, name.size() - open - 2);
  size_t pos = 0;
  while (pos < inner.size()) {
    size_t comma = inner.find(',', pos);
    if (comma == std::string::npos) comma = inner.size();
    try {
      out.args.push_back(std::stoi(inner.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw UnknownFixture(name);
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

StepTwoGroup builtin_group(const std::string& name) {
  const FixtureName f = parse_fixture(name);

  if (f.base == "heisenberg") {
    const int n = f.args.empty() ? 1 : f.args[0];
    if (n < 1) throw UnknownFixture(name);
    return validate_group({symplectic_block(2 * n)});
  }

  if (f.base == "n32") {
    // Free step-two group on 3 generators: U^(j) = standard basis of so(3).
    Eigen::MatrixXd U1 = Eigen::MatrixXd::Zero(3, 3), U2 = U1, U3 = U1;
    U1(0, 1) = 1;
    U1(1, 0) = -1;
    U2(0, 2) = 1;
    U2(2, 0) = -1;
    U3(1, 2) = 1;
    U3(2, 1) = -1;
    return validate_group({U1, U2, U3});
  }

  if (f.base == "htype") {
    if (f.args.size() != 2) throw UnknownFixture(name);
    const int q = f.args[0], m = f.args[1];
    if (m == 1) {
      if (q < 2 || q % 2 != 0) throw UnknownFixture(name);
      return validate_group({symplectic_block(q)});
    }
    if (m == 2 || m == 3) {
      if (q < 4 || q % 4 != 0) throw UnknownFixture(name);
      const auto quat = quaternion_units();
      std::vector<Eigen::MatrixXd> Us;
      const int copies = q / 4;
      for (int j = 0; j < m; ++j) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(q, q);
        for (int c = 0; c < copies; ++c) M.block(4 * c, 4 * c, 4, 4) = quat[j];
        Us.push_back(M);
      }
      return validate_group(Us);
    }
    throw UnknownFixture(name);  // m >= 4 needs Clifford modules beyond this fixture set
  }

  if (f.base == "corank1") {
    if (f.args.size() != 1) throw UnknownFixture(name);
    const int q = f.args[0];
    if (q < 2) throw UnknownFixture(name);
    // Single skew matrix with distinct frequencies 1,2,... (zero row/col when q odd).
    return validate_group({symplectic_block(q, 1.0, /*ladder=*/true)});
  }

  if (f.base == "kolmogorov") {
    // One symplectic plane per vertical coordinate; the reference set becomes a
    // cube rather than a ball.
    if (f.args.size() != 1) throw UnknownFixture(name);
    const int q = f.args[0];
    if (q < 4 || q % 2 != 0) throw UnknownFixture(name);
    const int m = q / 2;
    std::vector<Eigen::MatrixXd> Us;
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(q, q);
      M(2 * j, 2 * j + 1) = 1;
      M(2 * j + 1, 2 * j) = -1;
      Us.push_back(M);
    }
    return validate_group(Us);
  }

  throw UnknownFixture(name);
}

}  // namespace ccdist
