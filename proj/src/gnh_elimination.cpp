#include "mvtk/gnh_elimination.hpp"

#include <cmath>

namespace mvtk::gnh {

namespace {

// Row echelon reduction with partial pivoting; returns rank and pivots.
int rref(Eigen::MatrixXd& M, Eigen::VectorXd& g, double tol, std::vector<int>* pivots) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  double scale = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
  scale = std::max(scale, 1.0);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(M(i, c)) > std::abs(M(p, c))) p = i;
    if (std::abs(M(p, c)) <= tol * scale) continue;
    M.row(r).swap(M.row(p));
    std::swap(g(r), g(p));
    const double piv = M(r, c);
    M.row(r) /= piv;
    g(r) /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = M(i, c);
      if (f != 0.0) {
        M.row(i) -= f * M.row(r);
        g(i) -= f * g(r);
      }
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  return r;
}

// Kernel basis of E (free-variable construction from the reduced form).
Eigen::MatrixXd kernel_by_elimination(Eigen::MatrixXd E, double tol) {
  const int n = static_cast<int>(E.cols());
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(E.rows());
  std::vector<int> pivots;
  const int rank = rref(E, dummy, tol, &pivots);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  Eigen::MatrixXd K(n, n - rank);
  int col = 0;
  for (int c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(c) = 1.0;
    for (int r = 0; r < rank; ++r) v(pivots[r]) = -E(r, c);
    K.col(col++) = v;
  }
  return K;
}

// Left null space of M: kernel of M^T.
Eigen::MatrixXd left_null_by_elimination(const Eigen::MatrixXd& M, double tol) {
  return kernel_by_elimination(M.transpose(), tol);
}

struct StackResult {
  EliminationStage stage;
  Eigen::VectorXd particular;  // valid iff !stage.empty
};

StackResult reduce_stack(Eigen::MatrixXd E, Eigen::VectorXd g, int n, double tol) {
  StackResult out;
  const double scale = std::max({E.size() ? E.cwiseAbs().maxCoeff() : 0.0,
                                 g.size() ? g.cwiseAbs().maxCoeff() : 0.0, 1.0});
  std::vector<int> pivots;
  const int rank = rref(E, g, tol, &pivots);
  // inconsistency: a zero row with nonzero rhs
  for (int i = rank; i < E.rows(); ++i) {
    if (E.row(i).cwiseAbs().maxCoeff() <= tol * scale && std::abs(g(i)) > 100.0 * tol * scale) {
      out.stage.empty = true;
      out.stage.dim = -1;
      return out;
    }
  }
  out.stage.E = E.topRows(rank);
  out.stage.g = g.head(rank);
  out.stage.dim = n - rank;
  out.particular = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < rank; ++r) out.particular(pivots[r]) = g(r);
  return out;
}

}  // namespace

EliminationChain elimination_chain(const PresymplecticSystem& sys, double tol) {
  const int n = sys.n();
  EliminationChain chain;
  chain.stages.push_back(EliminationStage{Eigen::MatrixXd(0, n), Eigen::VectorXd(0), n, false});
  chain.dims.push_back(n);

  Eigen::MatrixXd Ek(0, n);
  Eigen::VectorXd gk(0);

  for (int it = 0; it <= n + 1; ++it) {
    // tangent space of the current stage and its image under omega
    const Eigen::MatrixXd N = kernel_by_elimination(Ek, tol);
    const Eigen::MatrixXd R = sys.omega * N;
    const Eigen::MatrixXd U = left_null_by_elimination(R, tol);
    // new conditions u^T (A z + b) = 0
    Eigen::MatrixXd E2(Ek.rows() + U.cols(), n);
    Eigen::VectorXd g2(Ek.rows() + U.cols());
    E2.topRows(Ek.rows()) = Ek;
    g2.head(Ek.rows()) = gk;
    for (int c = 0; c < U.cols(); ++c) {
      E2.row(Ek.rows() + c) = U.col(c).transpose() * sys.A;
      g2(Ek.rows() + c) = -U.col(c).dot(sys.b);
    }
    StackResult red = reduce_stack(E2, g2, n, tol);
    if (red.stage.empty) {
      chain.empty_at_some_stage = true;
      chain.stabilized_at = it;
      return chain;
    }
    if (red.stage.dim == chain.dims.back()) {
      chain.stabilized_at = it;
      return chain;
    }
    chain.stages.push_back(red.stage);
    chain.dims.push_back(red.stage.dim);
    Ek = red.stage.E;
    gk = red.stage.g;
  }
  chain.stabilized_at = n + 1;
  return chain;
}

ChainComparison compare_chains(const PresymplecticSystem& sys, const ConstraintChain& a,
                               const EliminationChain& b, double tol) {
  ChainComparison cmp;
  cmp.dims_match = (a.dims == b.dims);
  cmp.emptiness_match = (a.empty_at_some_stage == b.empty_at_some_stage);
  if (!cmp.dims_match) return cmp;

  for (std::size_t k = 1; k < a.subspaces.size() && k < b.stages.size(); ++k) {
    const AffineSubspace& sa = a.subspaces[k];
    const EliminationStage& sb = b.stages[k];
    // orthonormalize the elimination kernel for the angle comparison
    Eigen::MatrixXd K = kernel_by_elimination(sb.E, tol);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    AffineSubspace ortho{Eigen::VectorXd::Zero(sys.n()), Q};
    cmp.max_angle = std::max(cmp.max_angle, max_principal_angle(sa, ortho));
    // engine basepoint must satisfy the elimination equations
    if (sb.E.rows() > 0) {
      const double scale = std::max(1.0, sb.g.cwiseAbs().maxCoeff());
      const double r = (sb.E * sa.basepoint - sb.g).cwiseAbs().maxCoeff() / scale;
      cmp.max_basepoint_residual = std::max(cmp.max_basepoint_residual, r);
    }
  }
  return cmp;
}

}  // namespace mvtk::gnh
