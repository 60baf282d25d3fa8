#ifndef MVTK_GNH_ELIMINATION_HPP
#define MVTK_GNH_ELIMINATION_HPP

#include <Eigen/Dense>

#include <vector>

#include "mvtk/gnh.hpp"

namespace mvtk::gnh {

// Independent elimination-based route to the constraint chain: every stage is
// carried as a stack of linear equations E z = g reduced by Gaussian
// elimination with partial pivoting (no SVD, no orthogonal factorizations).
// Used to cross-check gnh_iterate on desk-scale systems.
struct EliminationStage {
  Eigen::MatrixXd E;  // row-reduced equations
  Eigen::VectorXd g;
  int dim = 0;        // n - rank
  bool empty = false; // inconsistent stack
};

struct EliminationChain {
  std::vector<EliminationStage> stages;  // stages[0]: no equations (ambient)
  std::vector<int> dims;
  bool empty_at_some_stage = false;
  int stabilized_at = -1;
};

EliminationChain elimination_chain(const PresymplecticSystem& sys, double tol = 1e-10);

// Comparison against the SVD engine: matching dims/emptiness, principal
// angles between stage tangent spaces below angle_tol, and mutual basepoint
// membership.
struct ChainComparison {
  bool dims_match = false;
  bool emptiness_match = false;
  double max_angle = 0.0;
  double max_basepoint_residual = 0.0;
  bool agree(double angle_tol) const {
    return dims_match && emptiness_match && max_angle < angle_tol;
  }
};

ChainComparison compare_chains(const PresymplecticSystem& sys, const ConstraintChain& a,
                               const EliminationChain& b, double tol = 1e-10);

}  // namespace mvtk::gnh

#endif
