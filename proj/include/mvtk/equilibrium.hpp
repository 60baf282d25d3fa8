#ifndef MVTK_EQUILIBRIUM_HPP
#define MVTK_EQUILIBRIUM_HPP

#include <optional>

#include "mvtk/dynamics.hpp"
#include "mvtk/grid.hpp"
#include "mvtk/profiles.hpp"
#include "mvtk/spectral.hpp"

namespace mvtk {

// Stationary solution (F0, E0, B0) with its measured rhs residual.  The
// residual is evaluated at construction; consumers decide how small is small
// enough for their purpose.
struct Equilibrium {
  enum class Kind { maxwellian, two_stream, bump_on_tail, custom };

  Kind kind = Kind::maxwellian;
  std::optional<AnalyticVelocityProfile> profile;  // set iff homogeneous
  State state;
  bool homogeneous = true;
  double rhs_residual_inf = 0.0;
  double rhs_residual_l2 = 0.0;

  // F0 sampled on the velocity grid (homogeneous case),
  std::vector<double> f0_velocity(const PhaseGrid& grid) const;
};

Equilibrium make_homogeneous_equilibrium(const AnalyticVelocityProfile& F0,
                                         Equilibrium::Kind kind, const PhaseGrid& grid,
                                         const Fourier& fx);

// Inhomogeneous stationary state pinned by a potential ripple: the
// distribution is a function of the particle invariant e = v^2/2 + q phi(x)
// with phi = amplitude * cos(2 pi m x / L), and E = -dphi/dx.  Exactly
// stationary for the Ampere-form flow (current vanishes identically); used as
// the relaxed symmetry-broken equilibrium for the Goldstone diagnostics.
Equilibrium make_pinned_equilibrium(const PhaseGrid& grid, const Fourier& fx,
                                    double amplitude, int k_mode);

// d/dx of the equilibrium state (the x-translation symmetry direction).
StateTangent translation_direction(const State& z, const PhaseGrid& grid, const Fourier& fx);

}  // namespace mvtk

#endif
