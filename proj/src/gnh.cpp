#include "mvtk/gnh.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mvtk::gnh {

namespace {

// Rank decisions use the relative tolerance plus an absolute floor tied to
// the magnitude of the system data, so blocks that are zero up to rounding
// noise are treated as rank zero.
double rank_cut(const Eigen::VectorXd& s, double tol, double floor) {
  return std::max(s.size() ? s(0) * tol : 0.0, floor);
}

// Orthonormal basis of the column space (left factor).
Eigen::MatrixXd column_space(const Eigen::MatrixXd& M, double tol, double floor) {
  if (M.cols() == 0 || M.rows() == 0) return Eigen::MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = rank_cut(s, tol, floor);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the null space.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& M, double tol, double floor) {
  if (M.cols() == 0) return Eigen::MatrixXd(0, 0);
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = rank_cut(s, tol, floor);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(M.cols() - r);
}

// Minimal-norm least-squares solution together with its residual.
struct LsqResult {
  Eigen::VectorXd x;
  double residual;
};

LsqResult lsq_min_norm(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, double tol,
                       double floor) {
  if (M.cols() == 0) {
    return {Eigen::VectorXd(0), M.rows() ? c.norm() : 0.0};
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = rank_cut(s, tol, floor);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(M.cols());
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) <= cut) break;
    x += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(c) / s(i));
  }
  return {x, (M * x - c).norm()};
}

double system_scale(const PresymplecticSystem& sys) {
  double s = sys.b.size() ? sys.b.cwiseAbs().maxCoeff() : 0.0;
  if (sys.A.size()) s = std::max(s, sys.A.cwiseAbs().maxCoeff());
  if (sys.omega.size()) s = std::max(s, sys.omega.cwiseAbs().maxCoeff());
  return std::max(s, 1.0);
}

}  // namespace

PresymplecticSystem PresymplecticSystem::make(Eigen::MatrixXd omega, Eigen::MatrixXd A,
                                              Eigen::VectorXd b,
                                              std::vector<std::string> labels) {
  const int n = static_cast<int>(omega.rows());
  if (omega.cols() != n || A.rows() != n || A.cols() != n || b.size() != n)
    throw std::invalid_argument("PresymplecticSystem: inconsistent dimensions");
  const double scale = std::max({omega.cwiseAbs().maxCoeff(), A.cwiseAbs().maxCoeff(), 1.0});
  if ((omega + omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("PresymplecticSystem: omega is not skew");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("PresymplecticSystem: A is not symmetric");
  PresymplecticSystem sys;
  sys.omega = 0.5 * (omega - omega.transpose());
  sys.A = 0.5 * (A + A.transpose());
  sys.b = std::move(b);
  sys.labels = std::move(labels);
  return sys;
}

bool AffineSubspace::contains(const Eigen::VectorXd& z, double tol) const {
  const Eigen::VectorXd d = z - basepoint;
  const Eigen::VectorXd residual = d - directions * (directions.transpose() * d);
  const double scale = std::max(1.0, z.norm());
  return residual.norm() <= tol * scale;
}

Eigen::VectorXd AffineSubspace::point(const Eigen::VectorXd& y) const {
  return basepoint + directions * y;
}

double max_principal_angle(const AffineSubspace& a, const AffineSubspace& b) {
  if (a.dim() != b.dim()) return M_PI / 2.0;
  if (a.dim() == 0) return 0.0;
  // sine-based formulation: well conditioned for nearly identical subspaces,
  // where the cosine route loses half the digits
  const Eigen::MatrixXd r =
      a.directions - b.directions * (b.directions.transpose() * a.directions);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  smax = std::min(1.0, smax);
  return std::asin(smax);
}

bool contained_in(const AffineSubspace& s1, const AffineSubspace& s2, double tol) {
  if (!s2.contains(s1.basepoint, tol)) return false;
  // every direction of s1 must lie in span(s2.directions)
  const Eigen::MatrixXd r =
      s1.directions - s2.directions * (s2.directions.transpose() * s1.directions);
  return r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol * 10.0;
}

namespace {

// Solution set of P (A z + b) = 0 restricted to the affine subspace `within`,
// where P projects onto the orthogonal complement of `range` (n x r).
std::optional<AffineSubspace> restrict_by_condition(const PresymplecticSystem& sys,
                                                    const AffineSubspace& within,
                                                    const Eigen::MatrixXd& range,
                                                    double tol) {
  const int n = sys.n();
  const double scale = system_scale(sys);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * scale * n;
  // rows spanning the annihilator of `range`
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - range * range.transpose();
  // condition on free coordinates y of `within`:  M y = -c
  const Eigen::MatrixXd M = P * sys.A * within.directions;
  const Eigen::VectorXd c = P * (sys.A * within.basepoint + sys.b);
  const LsqResult sol = lsq_min_norm(M, -c, tol, floor);
  if (sol.residual > 10.0 * tol * scale * std::max(1.0, c.norm() / scale))
    return std::nullopt;  // inconsistent: empty constraint set
  AffineSubspace out;
  out.basepoint = within.point(sol.x);
  const Eigen::MatrixXd ker = null_space(M, tol, floor);
  out.directions = within.directions * ker;  // orthonormal: isometry times orthonormal
  return out;
}

}  // namespace

std::optional<AffineSubspace> primary_constraint(const PresymplecticSystem& sys,
                                                 double tol) {
  const int n = sys.n();
  AffineSubspace ambient{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * system_scale(sys) * n;
  const Eigen::MatrixXd range = column_space(sys.omega, tol, floor);
  return restrict_by_condition(sys, ambient, range, tol);
}

ConstraintChain gnh_iterate(const PresymplecticSystem& sys, double tol) {
  const int n = sys.n();
  ConstraintChain chain;
  AffineSubspace ambient{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
  chain.subspaces.push_back(ambient);
  chain.dims.push_back(n);

  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * system_scale(sys) * n;
  for (int k = 0; k <= n + 1; ++k) {
    const AffineSubspace& prev = chain.subspaces.back();
    const Eigen::MatrixXd range = column_space(sys.omega * prev.directions, tol, floor);
    auto next = restrict_by_condition(sys, prev, range, tol);
    if (!next) {
      chain.empty_at_some_stage = true;
      chain.stabilized_at = k;
      return chain;
    }
    // dims can only decrease; equality of dimension plus nesting means the
    // chain has stabilized (checked through principal angles as well)
    if (next->dim() == prev.dim() &&
        max_principal_angle(*next, prev) < std::sqrt(tol) &&
        prev.contains(next->basepoint, std::sqrt(tol))) {
      chain.stabilized_at = k;
      return chain;
    }
    chain.subspaces.push_back(*next);
    chain.dims.push_back(next->dim());
  }
  throw std::runtime_error("gnh_iterate: chain failed to stabilize within n+1 steps");
}

VectorFieldSolution solve_vector_field(const PresymplecticSystem& sys,
                                       const ConstraintChain& chain, double tol) {
  if (chain.empty_at_some_stage)
    throw std::runtime_error("solve_vector_field: empty final constraint set");
  const AffineSubspace& C = chain.final_subspace();
  const double scale = system_scale(sys);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * scale * sys.n();
  const Eigen::MatrixXd D = C.directions;
  const Eigen::MatrixXd G = sys.omega * D;  // omega restricted to T C_inf

  // i_X omega = dH contracts the first slot of the skew form, so the matrix
  // equation reads omega X = -dH (canonical omega then gives X = J grad H)
  const Eigen::VectorXd g0 = -(sys.A * C.basepoint + sys.b);
  const LsqResult xi0 = lsq_min_norm(G, g0, tol, floor);
  if (xi0.residual > 100.0 * tol * scale * std::max(1.0, g0.norm() / scale))
    throw std::runtime_error(
        "solve_vector_field: omega X = dH unsolvable on the final subspace "
        "(chain tolerance too loose)");
  const Eigen::MatrixXd AD = -(sys.A * D);
  Eigen::MatrixXd Xi(D.cols(), D.cols());
  for (int c = 0; c < D.cols(); ++c) {
    const LsqResult col = lsq_min_norm(G, AD.col(c), tol, floor);
    if (col.residual > 100.0 * tol * scale)
      throw std::runtime_error("solve_vector_field: tangential system inconsistent");
    Xi.col(c) = col.x;
  }

  VectorFieldSolution out;
  out.basepoint = C.basepoint;
  out.X0 = D * xi0.x;
  out.M = D * Xi * D.transpose();
  out.kernel_basis = D * null_space(G, tol, floor);
  return out;
}

std::string chain_to_json(const PresymplecticSystem& sys, const ConstraintChain& chain) {
  nlohmann::ordered_json j;
  j["n"] = sys.n();
  j["labels"] = sys.labels;
  j["dims"] = chain.dims;
  j["stabilized_at"] = chain.stabilized_at;
  j["empty_at_some_stage"] = chain.empty_at_some_stage;
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : chain.subspaces) {
    nlohmann::ordered_json st;
    st["dim"] = s.dim();
    st["basepoint"] = std::vector<double>(s.basepoint.data(),
                                          s.basepoint.data() + s.basepoint.size());
    auto dirs = nlohmann::ordered_json::array();
    for (int c = 0; c < s.directions.cols(); ++c) {
      dirs.push_back(std::vector<double>(s.directions.col(c).data(),
                                         s.directions.col(c).data() + s.directions.rows()));
    }
    st["directions"] = dirs;
    stages.push_back(st);
  }
  j["subspaces"] = stages;
  return j.dump(2);
}

PresymplecticSystem free_particle_sr() {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(3, 3);
  omega(0, 2) = 1.0;
  omega(2, 0) = -1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(1, 1) = -1.0;  // H = p v - v^2/2
  A(1, 2) = A(2, 1) = 1.0;
  return PresymplecticSystem::make(omega, A, Eigen::VectorXd::Zero(3), {"q", "v", "p"});
}

PresymplecticSystem em_mode_sr(double k, double rho) {
  // coordinates (Phi, A, Phidot, Adot, P_Phi, P_A)
  const int n = 6;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  omega(0, 4) = 1.0;
  omega(4, 0) = -1.0;
  omega(1, 5) = 1.0;
  omega(5, 1) = -1.0;
  // H = P_Phi Phidot + P_A Adot - 1/2 (Adot + k Phi)^2 + rho Phi
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A(2, 4) = A(4, 2) = 1.0;  // P_Phi Phidot
  A(3, 5) = A(5, 3) = 1.0;  // P_A Adot
  A(3, 3) = -1.0;           // -1/2 Adot^2
  A(0, 0) = -k * k;         // -1/2 k^2 Phi^2
  A(0, 3) = A(3, 0) = -k;   // -k Phi Adot
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = rho;
  return PresymplecticSystem::make(omega, A, b,
                                   {"Phi", "A", "Phidot", "Adot", "P_Phi", "P_A"});
}

PresymplecticSystem em_two_mode_sr(double k1, double rho1, double k2, double rho2) {
  const PresymplecticSystem m1 = em_mode_sr(k1, rho1);
  const PresymplecticSystem m2 = em_mode_sr(k2, rho2);
  const int n = 12;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  omega.topLeftCorner(6, 6) = m1.omega;
  omega.bottomRightCorner(6, 6) = m2.omega;
  A.topLeftCorner(6, 6) = m1.A;
  A.bottomRightCorner(6, 6) = m2.A;
  b.head(6) = m1.b;
  b.tail(6) = m2.b;
  std::vector<std::string> labels;
  for (const auto& l : m1.labels) labels.push_back(l + "_1");
  for (const auto& l : m2.labels) labels.push_back(l + "_2");
  return PresymplecticSystem::make(omega, A, b, labels);
}

}  // namespace mvtk::gnh
