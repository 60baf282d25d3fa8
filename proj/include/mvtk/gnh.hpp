#ifndef MVTK_GNH_HPP
#define MVTK_GNH_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace mvtk::gnh {

// Finite-dimensional presymplectic system: constant skew form omega, quadratic
// Hamiltonian H(z) = 1/2 z^T A z + b^T z.  dH(z) = A z + b.
struct PresymplecticSystem {
  Eigen::MatrixXd omega;  // skew
  Eigen::MatrixXd A;      // symmetric
  Eigen::VectorXd b;
  std::vector<std::string> labels;  // optional coordinate names

  int n() const { return static_cast<int>(omega.rows()); }

  // Antisymmetrizes/symmetrizes the inputs; throws if the correction is
  // larger than a relative 1e-12.
  static PresymplecticSystem make(Eigen::MatrixXd omega, Eigen::MatrixXd A,
                                  Eigen::VectorXd b,
                                  std::vector<std::string> labels = {});
};

// Affine subspace x0 + span(directions); directions has orthonormal columns
// (possibly zero columns for a point).
struct AffineSubspace {
  Eigen::VectorXd basepoint;
  Eigen::MatrixXd directions;

  int dim() const { return static_cast<int>(directions.cols()); }
  bool contains(const Eigen::VectorXd& z, double tol) const;
  // a point of the subspace from free coordinates y (size dim())
  Eigen::VectorXd point(const Eigen::VectorXd& y) const;
};

// Largest principal angle (radians) between the direction spans.
double max_principal_angle(const AffineSubspace& a, const AffineSubspace& b);
// S1 subset of S2 within tol (directions and basepoint).
bool contained_in(const AffineSubspace& s1, const AffineSubspace& s2, double tol);

struct ConstraintChain {
  std::vector<AffineSubspace> subspaces;  // subspaces[0] is the ambient space
  std::vector<int> dims;
  int stabilized_at = -1;  // first k with C_k == C_{k-1} (0 means C0 == W)
  bool empty_at_some_stage = false;

  const AffineSubspace& final_subspace() const { return subspaces.back(); }
};

// C0 = { z : dH(z) in Im(omega) }.  Numerical rank policy: singular values
// below tol * largest are treated as zero.  An inconsistent linear system
// yields nullopt ("empty constraint set", not an error).
std::optional<AffineSubspace> primary_constraint(const PresymplecticSystem& sys,
                                                 double tol = 1e-10);

// Full GNH iteration C_{k+1} = { z in C_k : dH(z) in omega(T C_k) } until the
// chain stabilizes.  The chain starts at the ambient space; an empty stage
// truncates the chain with the marker set.
ConstraintChain gnh_iterate(const PresymplecticSystem& sys, double tol = 1e-10);

// Affine solution X(z) = X0 + M (z - basepoint) of omega X = dH tangent to the
// final subspace, plus a basis of ker(omega) intersected with T C_inf spanning
// the solution ambiguity.
struct VectorFieldSolution {
  Eigen::VectorXd basepoint;
  Eigen::VectorXd X0;
  Eigen::MatrixXd M;
  Eigen::MatrixXd kernel_basis;  // n x k, orthonormal columns

  Eigen::VectorXd at(const Eigen::VectorXd& z) const { return X0 + M * (z - basepoint); }
};

// Throws std::runtime_error when omega X = dH is unsolvable on the final
// subspace (signals a too-loose chain tolerance).
VectorFieldSolution solve_vector_field(const PresymplecticSystem& sys,
                                       const ConstraintChain& chain, double tol = 1e-10);

std::string chain_to_json(const PresymplecticSystem& sys, const ConstraintChain& chain);

// Desk-scale Skinner-Rusk encodings ------------------------------------------

// Free particle in (q, v, p): omega = dq ^ dp, H = p v - v^2 / 2.
PresymplecticSystem free_particle_sr();

// Longitudinal electromagnetic mode k with a static external charge rho:
// coordinates (Phi, A, Phidot, Adot, P_Phi, P_A), omega pairs configuration
// with momentum, H = P_Phi Phidot + P_A Adot - 1/2 (Adot + k Phi)^2 + rho Phi.
// The chain shows P_Phi = 0 first, then the mode Gauss relation
// k (Adot + k Phi) = rho.
PresymplecticSystem em_mode_sr(double k, double rho);

// Direct sum of two electromagnetic modes.
PresymplecticSystem em_two_mode_sr(double k1, double rho1, double k2, double rho2);

}  // namespace mvtk::gnh

#endif
