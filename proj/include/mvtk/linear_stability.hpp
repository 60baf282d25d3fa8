#ifndef MVTK_LINEAR_STABILITY_HPP
#define MVTK_LINEAR_STABILITY_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvtk/equilibrium.hpp"
#include "mvtk/fitting.hpp"
#include "mvtk/grid.hpp"
#include "mvtk/profiles.hpp"

namespace mvtk {

// Per-Fourier-mode linearization around a homogeneous electrostatic
// equilibrium, on block coordinates (delta f(v_0..v_{Nv-1}), delta E):
//   d(delta f)/dt = -i k v delta f - q F0'(v) delta E
//   d(delta E)/dt = -q sum_j w_j v_j delta f_j
// F0' is taken with the shared velocity stencil, so the operator is the exact
// Frechet derivative of the nonlinear rhs restricted to the mode.
struct LinearOperator {
  double k = 0.0;
  int mode = 0;
  Eigen::MatrixXcd matrix;
  std::vector<std::string> block_labels;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

LinearOperator build_linear_operator(const Equilibrium& eq, int k_mode,
                                     const PhaseGrid& grid);

struct EigenvalueInfo {
  std::complex<double> lambda;
  bool neutral = false;
};

// Dense eigendecomposition, sorted by real part (descending).  Eigenvalues
// with |Re| below `neutral_tol` are flagged neutral.
std::vector<EigenvalueInfo> spectrum(const LinearOperator& op, double neutral_tol = 1e-10);

// Orthogonal projector onto the complement of the neutral eigenspace.
struct EffectiveProjector {
  Eigen::MatrixXcd P;
  int corank = 0;
  bool fallback_warning = false;  // defective cluster, singular-subspace used
};

EffectiveProjector effective_projector(const LinearOperator& op, double tol = 1e-10);

// Electrostatic dispersion relation D(omega) = 1 - k^{-2} I(omega/k) with
// I the Landau-contour integral of F0'/(v - zeta); evaluated by adaptive
// quadrature of the regularized integrand plus the closed-form log/residue
// continuation, then polished by a complex Newton iteration seeded from a
// coarse |D| scan.
struct OracleRootError : std::runtime_error {
  explicit OracleRootError(const std::string& msg,
                           std::vector<std::complex<double>> minima = {})
      : std::runtime_error(msg), scan_minima(std::move(minima)) {}
  std::vector<std::complex<double>> scan_minima;
};

std::complex<double> dielectric(const AnalyticVelocityProfile& F0, double k,
                                std::complex<double> omega);

// Least-damped root (largest imaginary part), normalized to Re omega >= 0.
std::complex<double> dispersion_root_oracle(const AnalyticVelocityProfile& F0, double k);

// Residual of the linearized dynamics on a broken-symmetry direction; only
// the x-translation generator exists in the reduced geometry (gauge
// directions are fixed by the zero-mean field gauge).  dz = dx(equilibrium
// state), residual = || L dz || / || dz || with L evaluated by central
// differencing of the nonlinear rhs (exact here: rhs is quadratic).
enum class SymmetryGenerator { x_translation };

struct NeutralModeReport {
  double residual = 0.0;
  bool trivially_neutral = false;  // homogeneous equilibrium, dz = 0
  double direction_norm = 0.0;
};

NeutralModeReport neutral_mode_residual(const Equilibrium& eq, const PhaseGrid& grid,
                                        const Fourier& fx,
                                        SymmetryGenerator generator =
                                            SymmetryGenerator::x_translation);

// Field-energy decay (or growth) rate of the time-evolved linear system,
// started from the density-perturbation shape delta f = F0(v).
DecayFit linear_field_energy_rate(const LinearOperator& op, const Equilibrium& eq,
                                  const PhaseGrid& grid, double t_end, double dt,
                                  double fit_t_min, double fit_t_max);

// Spectrum rows serialize to CSV (k, re, im, neutral).
std::string spectrum_to_csv(const LinearOperator& op,
                            const std::vector<EigenvalueInfo>& eigs);

}  // namespace mvtk

#endif
