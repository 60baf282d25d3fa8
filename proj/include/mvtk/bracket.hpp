#ifndef MVTK_BRACKET_HPP
#define MVTK_BRACKET_HPP

#include <vector>

#include "mvtk/grid.hpp"
#include "mvtk/spectral.hpp"

namespace mvtk {

// Variational derivative of an observable F(f, E, B).  d_f lives on the
// phase grid, d_E* / d_B3 on the spatial grid.  d_A1/d_A2 are optional
// covectors pairing against the vector potential; antenna current-coupling
// functionals are affine in A and enter the algebra only through this slot.
struct FunctionalDerivative {
  std::vector<double> d_f;
  std::vector<double> d_E1;
  std::vector<double> d_E2;
  std::vector<double> d_B3;
  std::vector<double> d_A1;
  std::vector<double> d_A2;

  static FunctionalDerivative zeros(const PhaseGrid& grid);
};

// Derivative of the Maxwell-Vlasov Hamiltonian: d_f = |v|^2/2, d_E = E, d_B = B.
FunctionalDerivative energy_derivative(const State& z, const PhaseGrid& grid);

// Derivative of int f^p: d_f = p f^(p-1).
FunctionalDerivative lp_casimir_derivative(const State& z, const PhaseGrid& grid, double p);

// Canonical phase-space bracket {a,b}_{x,v} = dx(a) dv(b) - dv(a) dx(b),
// spectral in x, 4th-order differences in v.
std::vector<double> canonical_xv_bracket(const std::vector<double>& a,
                                         const std::vector<double>& b,
                                         const PhaseGrid& grid, const Fourier& fx);

// The Maxwell-Vlasov Lie-Poisson bracket {F,G}(z) evaluated by grid
// quadrature.  ES_1D1V keeps the Vlasov and field-particle coupling terms;
// EM_1D2V adds the magnetic twisting and pure Maxwell terms.  The particle
// charge q multiplies the coupling and twisting terms so that the induced
// flow carries the Lorentz force q(E + v x B).
double mv_bracket(const FunctionalDerivative& Fd, const FunctionalDerivative& Gd,
                  const State& z, const PhaseGrid& grid, const Fourier& fx);

// The unique tangent zdot with <Fd, zdot> = mv_bracket(Fd, Hd, z) for every
// linear observable F; assembled with the exact discrete adjoints of the
// derivative stencils, so the duality holds to rounding.
StateTangent hamiltonian_vector_field(const FunctionalDerivative& Hd, const State& z,
                                      const PhaseGrid& grid, const Fourier& fx);

// <Fd, t> under the grid quadrature pairing (the action of dF on a tangent).
double pair_derivative_tangent(const FunctionalDerivative& Fd, const StateTangent& t,
                               const PhaseGrid& grid);

}  // namespace mvtk

#endif
