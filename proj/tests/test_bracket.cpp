#include "doctest.h"

#include <cmath>

#include "mvtk/bracket.hpp"
#include "test_support.hpp"

using namespace mvtk;

namespace {

State maxwellian_state(const PhaseGrid& g) {
  State z = State::zeros(g);
  for (int ix = 0; ix < g.Nx; ++ix)
    for (int j = 0; j < g.Nv; ++j)
      z.f[g.idx(ix, j)] = std::exp(-0.5 * g.v(j) * g.v(j)) / std::sqrt(2.0 * M_PI);
  return z;
}

}  // namespace

TEST_CASE("canonical_xv_bracket") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 64, 6.0, 128);
  Fourier fx(g.Nx, g.L);

  SUBCASE("antisymmetry diagonal vanishes to machine precision") {
    testsupport::Rng rng(21);
    const auto a = testsupport::random_phase(g, rng);
    const auto out = canonical_xv_bracket(a, a, g, fx);
    for (double x : out) CHECK(std::abs(x) < 1e-12);
  }

  SUBCASE("analytic pair: a = sin(2 pi x / L), b = v^2/2") {
    std::vector<double> a(g.phase_size()), b(g.phase_size());
    const double k = 2.0 * M_PI / g.L;
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j) {
        a[g.idx(ix, j)] = std::sin(k * g.x(ix));
        b[g.idx(ix, j)] = 0.5 * g.v(j) * g.v(j);
      }
    const auto out = canonical_xv_bracket(a, b, g, fx);
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j)
        CHECK(std::abs(out[g.idx(ix, j)] - k * std::cos(k * g.x(ix)) * g.v(j)) < 1e-6);
  }

  SUBCASE("v-independent pair gives zero") {
    std::vector<double> a(g.phase_size()), b(g.phase_size());
    const double k = 2.0 * M_PI / g.L;
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j) {
        a[g.idx(ix, j)] = std::sin(k * g.x(ix));
        b[g.idx(ix, j)] = std::cos(2 * k * g.x(ix));
      }
    for (double x : canonical_xv_bracket(a, b, g, fx)) CHECK(std::abs(x) < 1e-12);
  }
}

TEST_CASE("mv_bracket algebra") {
  const PhaseGrid ges = PhaseGrid::es_1d1v(4 * M_PI, 32, 6.0, 48);
  const PhaseGrid gem = PhaseGrid::em_1d2v(2 * M_PI, 12, 5.0, 12);
  Fourier fes(ges.Nx, ges.L), fem(gem.Nx, gem.L);
  testsupport::Rng rng(23);

  SUBCASE("diagonal vanishes") {
    for (int t = 0; t < 5; ++t) {
      const State z = testsupport::random_state(ges, rng);
      FunctionalDerivative Fd = FunctionalDerivative::zeros(ges);
      Fd.d_f = testsupport::random_phase(ges, rng);
      Fd.d_E1 = testsupport::random_spatial(ges, rng);
      CHECK(std::abs(mv_bracket(Fd, Fd, z, ges, fes)) < 1e-12);
    }
  }

  SUBCASE("total-mass derivative annihilates everything") {
    const State z = testsupport::random_state(ges, rng);
    FunctionalDerivative mass = FunctionalDerivative::zeros(ges);
    for (auto& x : mass.d_f) x = 1.0;
    FunctionalDerivative Fd = FunctionalDerivative::zeros(ges);
    Fd.d_f = testsupport::random_phase(ges, rng);
    Fd.d_E1 = testsupport::random_spatial(ges, rng);
    CHECK(std::abs(mv_bracket(Fd, mass, z, ges, fes)) < 1e-13);
    CHECK(std::abs(mv_bracket(mass, Fd, z, ges, fes)) < 1e-13);
  }

  SUBCASE("antisymmetry on random triples, both configurations") {
    for (int t = 0; t < 20; ++t) {
      const bool em = t % 2 == 1;
      const PhaseGrid& g = em ? gem : ges;
      const Fourier& fx = em ? fem : fes;
      const State z = testsupport::random_state(g, rng);
      FunctionalDerivative Fd = FunctionalDerivative::zeros(g);
      FunctionalDerivative Gd = FunctionalDerivative::zeros(g);
      Fd.d_f = testsupport::random_phase(g, rng);
      Fd.d_E1 = testsupport::random_spatial(g, rng);
      Gd.d_f = testsupport::random_phase(g, rng);
      Gd.d_E1 = testsupport::random_spatial(g, rng);
      if (em) {
        Fd.d_E2 = testsupport::random_spatial(g, rng);
        Fd.d_B3 = testsupport::random_spatial(g, rng);
        Gd.d_E2 = testsupport::random_spatial(g, rng);
        Gd.d_B3 = testsupport::random_spatial(g, rng);
      }
      const double ab = mv_bracket(Fd, Gd, z, g, fx);
      const double ba = mv_bracket(Gd, Fd, z, g, fx);
      CHECK(std::abs(ab + ba) <= 1e-12 * std::max(1.0, std::abs(ab)));
    }
  }

  SUBCASE("missing d_B3 in EM is an input error") {
    const State z = testsupport::random_state(gem, rng);
    FunctionalDerivative Fd = FunctionalDerivative::zeros(gem);
    FunctionalDerivative Gd = FunctionalDerivative::zeros(gem);
    Gd.d_B3.clear();
    CHECK_THROWS_AS(mv_bracket(Fd, Gd, z, gem, fem), std::invalid_argument);
  }
}

TEST_CASE("hamiltonian_vector_field") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 32, 6.0, 64);
  Fourier fx(g.Nx, g.L);
  testsupport::Rng rng(29);

  SUBCASE("zero derivative gives zero tangent") {
    const State z = testsupport::random_state(g, rng);
    const FunctionalDerivative Hd = FunctionalDerivative::zeros(g);
    const StateTangent t = hamiltonian_vector_field(Hd, z, g, fx);
    CHECK(tangent_norm_inf(t) == 0.0);
  }

  SUBCASE("energy derivative annihilates the homogeneous Maxwellian") {
    const State z = maxwellian_state(g);
    const StateTangent t =
        hamiltonian_vector_field(energy_derivative(z, g), z, g, fx);
    CHECK(tangent_norm_inf(t) < 1e-13);
  }

  SUBCASE("duality against the bracket holds to rounding") {
    for (int t = 0; t < 8; ++t) {
      const State z = testsupport::random_state(g, rng);
      FunctionalDerivative Fd = FunctionalDerivative::zeros(g);
      FunctionalDerivative Hd = FunctionalDerivative::zeros(g);
      Fd.d_f = testsupport::random_phase(g, rng);
      Fd.d_E1 = testsupport::random_spatial(g, rng);
      Hd.d_f = testsupport::random_phase(g, rng);
      Hd.d_E1 = testsupport::random_spatial(g, rng);
      const double lhs = pair_derivative_tangent(Fd, hamiltonian_vector_field(Hd, z, g, fx), g);
      const double rhs = mv_bracket(Fd, Hd, z, g, fx);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }

  SUBCASE("duality in the EM configuration") {
    const PhaseGrid gem = PhaseGrid::em_1d2v(2 * M_PI, 12, 5.0, 12);
    Fourier fem(gem.Nx, gem.L);
    for (int t = 0; t < 4; ++t) {
      const State z = testsupport::random_state(gem, rng);
      FunctionalDerivative Fd = FunctionalDerivative::zeros(gem);
      FunctionalDerivative Hd = FunctionalDerivative::zeros(gem);
      Fd.d_f = testsupport::random_phase(gem, rng);
      Fd.d_E1 = testsupport::random_spatial(gem, rng);
      Fd.d_E2 = testsupport::random_spatial(gem, rng);
      Fd.d_B3 = testsupport::random_spatial(gem, rng);
      Hd.d_f = testsupport::random_phase(gem, rng);
      Hd.d_E1 = testsupport::random_spatial(gem, rng);
      Hd.d_E2 = testsupport::random_spatial(gem, rng);
      Hd.d_B3 = testsupport::random_spatial(gem, rng);
      const double lhs =
          pair_derivative_tangent(Fd, hamiltonian_vector_field(Hd, z, gem, fem), gem);
      const double rhs = mv_bracket(Fd, Hd, z, gem, fem);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }

  SUBCASE("self-bracket of the energy vanishes identically") {
    const State z = testsupport::random_state(g, rng);
    const FunctionalDerivative Hd = energy_derivative(z, g);
    CHECK(std::abs(mv_bracket(Hd, Hd, z, g, fx)) < 1e-13);
  }
}
