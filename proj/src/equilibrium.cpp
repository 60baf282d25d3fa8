#include "mvtk/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace mvtk {

std::vector<double> Equilibrium::f0_velocity(const PhaseGrid& grid) const {
  if (!homogeneous)
    throw std::invalid_argument("Equilibrium::f0_velocity: equilibrium is inhomogeneous");
  std::vector<double> f0(grid.Nv);
  for (int j = 0; j < grid.Nv; ++j) f0[j] = profile->value(grid.v(j));
  return f0;
}

namespace {

void attach_residual(Equilibrium& eq, const PhaseGrid& grid, const Fourier& fx) {
  const StateTangent t = rhs(eq.state, grid, fx);
  eq.rhs_residual_inf = tangent_norm_inf(t);
  eq.rhs_residual_l2 = tangent_norm2(t, grid);
}

}  // namespace

Equilibrium make_homogeneous_equilibrium(const AnalyticVelocityProfile& F0,
                                         Equilibrium::Kind kind, const PhaseGrid& grid,
                                         const Fourier& fx) {
  Equilibrium eq;
  eq.kind = kind;
  eq.profile = F0;
  eq.homogeneous = true;
  eq.state = homogeneous_state(F0, grid);
  attach_residual(eq, grid, fx);
  return eq;
}

Equilibrium make_pinned_equilibrium(const PhaseGrid& grid, const Fourier& fx,
                                    double amplitude, int k_mode) {
  if (grid.config != GridConfig::ES_1D1V)
    throw std::invalid_argument("make_pinned_equilibrium: ES_1D1V only");
  Equilibrium eq;
  eq.kind = Equilibrium::Kind::custom;
  eq.homogeneous = false;
  eq.state = State::zeros(grid);

  const double k = 2.0 * M_PI * k_mode / grid.L;
  const double q = grid.q;
  const double inv_sqrt2pi = 0.39894228040143267794;

  // normalize the spatial density factor to unit mean
  double mean = 0.0;
  for (int ix = 0; ix < grid.Nx; ++ix)
    mean += std::exp(-q * amplitude * std::cos(k * grid.x(ix)));
  mean /= grid.Nx;

  for (int ix = 0; ix < grid.Nx; ++ix) {
    const double phi = amplitude * std::cos(k * grid.x(ix));
    const double nx = std::exp(-q * phi) / mean;
    eq.state.E1[ix] = amplitude * k * std::sin(k * grid.x(ix));  // E = -dphi/dx
    for (int j = 0; j < grid.Nv; ++j) {
      const double v = grid.v(j);
      eq.state.f[grid.idx(ix, j)] = nx * inv_sqrt2pi * std::exp(-0.5 * v * v);
    }
  }
  attach_residual(eq, grid, fx);
  return eq;
}

StateTangent translation_direction(const State& z, const PhaseGrid& grid,
                                   const Fourier& fx) {
  StateTangent t = StateTangent::zeros(grid);
  t.df = fx.ddx_phase(z.f, grid);
  t.dE1 = fx.ddx_field(z.E1);
  if (grid.config == GridConfig::EM_1D2V) {
    t.dE2 = fx.ddx_field(z.E2);
    t.dB3 = fx.ddx_field(z.B3);
  }
  return t;
}

}  // namespace mvtk
