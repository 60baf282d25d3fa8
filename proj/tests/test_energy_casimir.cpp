#include "doctest.h"

#include <cmath>

#include "mvtk/energy_casimir.hpp"
#include "test_support.hpp"

using namespace mvtk;

namespace {

Equilibrium maxwellian_eq(const PhaseGrid& g, const Fourier& fx) {
  return make_homogeneous_equilibrium(AnalyticVelocityProfile::maxwellian(1.0),
                                      Equilibrium::Kind::maxwellian, g, fx);
}

}  // namespace

TEST_CASE("casimir_from_equilibrium on the unit Maxwellian") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 16, 6.0, 128);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = maxwellian_eq(g, fx);
  const CasimirProfile prof = casimir_from_equilibrium(eq, g);

  // analytic inversion: phi'(s) = ln(s sqrt(2 pi)), phi'' = 1/s
  for (double v : {0.3, 1.0, 2.5, 4.0}) {
    const double s = std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
    CHECK(std::abs(prof.phi_prime(s) - std::log(s * std::sqrt(2.0 * M_PI))) < 1e-6);
    CHECK(std::abs(prof.phi_double_prime(s) - 1.0 / s) < 1e-6 / s);
    CHECK(prof.phi_double_prime(s) > 0.0);
  }
  // the linear-in-ln-s extension continues the Maxwellian profile exactly
  const double s_out = prof.s_min() * 1e-3;
  CHECK(std::abs(prof.phi_prime(s_out) - std::log(s_out * std::sqrt(2.0 * M_PI))) < 1e-6);
}

TEST_CASE("non-monotone and degenerate profiles are rejected with intervals") {
  SUBCASE("two-stream: rising stretch between the valley and the beam") {
    const PhaseGrid g = PhaseGrid::es_1d1v(10 * M_PI, 16, 8.4, 128);
    Fourier fx(g.Nx, g.L);
    const Equilibrium eq = make_homogeneous_equilibrium(
        AnalyticVelocityProfile::two_stream(2.4, 1.0), Equilibrium::Kind::two_stream, g, fx);
    bool raised = false;
    try {
      casimir_from_equilibrium(eq, g);
    } catch (const NonMonotoneCasimirError& e) {
      raised = true;
      CHECK(e.v_lo >= 0.0);
      CHECK(e.v_lo < 0.5);
      CHECK(e.v_hi > 2.0);
      CHECK(e.v_hi < 2.6);
    }
    CHECK(raised);
  }

  SUBCASE("flat-top: dF0/de = 0 degeneracy") {
    const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 16, 6.0, 64);
    std::vector<double> f0(g.Nv);
    for (int j = 0; j < g.Nv; ++j) {
      const double a = std::abs(g.v(j));
      f0[j] = a < 1.0 ? 0.25 : 0.25 * std::exp(-0.5 * (a - 1.0) * (a - 1.0));
    }
    CHECK_THROWS_AS(casimir_from_f0(f0, g), DegenerateCasimirError);
    try {
      casimir_from_f0(f0, g);
    } catch (const DegenerateCasimirError& e) {
      CHECK(e.v_lo < 1.0);  // the reported stretch sits inside the plateau
      CHECK(e.v_hi <= 1.0 + 2.0 * g.dv());
    }
  }

  SUBCASE("tabulated constructor rejects non-increasing s nodes") {
    CHECK_THROWS_AS(CasimirProfile::from_tabulated({0.5, 0.5, 0.6}, {0, 0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(CasimirProfile::from_tabulated({-0.1, 0.5}, {0, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("first_variation_residual") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 16, 6.0, 128);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = maxwellian_eq(g, fx);

  SUBCASE("constructed profile is critical to 1e-8") {
    const CasimirProfile prof = casimir_from_equilibrium(eq, g);
    CHECK(first_variation_residual(eq, prof, g) <= 1e-8);
    // stationarity/residual duality: the nonlinear rhs vanishes too
    CHECK(eq.rhs_residual_inf <= 1e-8);
  }

  SUBCASE("deliberately wrong profile phi' = 0 gives max v^2/2") {
    const CasimirProfile flat = CasimirProfile::from_tabulated(
        {1e-9, 1.0}, {0.0, 0.0});
    CHECK(first_variation_residual(eq, flat, g) ==
          doctest::Approx(0.5 * g.v_max * g.v_max).epsilon(1e-10));
  }

  SUBCASE("drifting Maxwellian against the rest-frame profile") {
    const double u0 = 0.3;
    const Equilibrium drift = make_homogeneous_equilibrium(
        AnalyticVelocityProfile::maxwellian(1.0, u0), Equilibrium::Kind::custom, g, fx);
    const CasimirProfile rest = casimir_from_equilibrium(eq, g);
    // residual(v) = v^2/2 - (v - u0)^2/2 = u0 v - u0^2/2, largest at v = -v_max
    const double expected = u0 * g.v_max + 0.5 * u0 * u0;
    CHECK(first_variation_residual(drift, rest, g) ==
          doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("second_variation_form and definiteness") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 16, 6.0, 96);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = maxwellian_eq(g, fx);
  const CasimirProfile prof = casimir_from_equilibrium(eq, g);
  const SecondVariationForm q = second_variation_form(eq, prof, g);

  SUBCASE("zero perturbation evaluates to zero") {
    CHECK(q.evaluate(StateTangent::zeros(g), g) == 0.0);
  }

  SUBCASE("supported positive perturbations are positive") {
    testsupport::Rng rng(5);
    StateTangent dz = StateTangent::zeros(g);
    dz.df = testsupport::random_phase(g, rng);
    CHECK(q.evaluate(dz, g) > 0.0);
  }

  SUBCASE("pure constant-field perturbation gives c^2 L") {
    StateTangent dz = StateTangent::zeros(g);
    const double c = 0.7;
    for (auto& e : dz.dE1) e = c;
    CHECK(q.evaluate(dz, g) == doctest::Approx(c * c * g.L).epsilon(1e-13));
  }

  SUBCASE("Maxwellian verdict: formally stable with positive minimum") {
    const DefinitenessReport rep = definiteness_report(q, g);
    CHECK(rep.verdict == Definiteness::positive_definite);
    CHECK(rep.min_eigenvalue > 0.0);
  }

  SUBCASE("a hand-built negative weight flips the verdict") {
    SecondVariationForm bad = q;
    bad.f_weight[g.Nv / 2] = -0.5;
    CHECK(definiteness_report(bad, g).verdict == Definiteness::indefinite);
  }

  SUBCASE("full-corank projector empties the space: degenerate") {
    const Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(g.Nv + 1, g.Nv + 1);
    CHECK(definiteness_report(q, g, &P).verdict == Definiteness::degenerate);
  }
}

TEST_CASE("monotone-in-energy profiles are Gardner stable (property)") {
  testsupport::Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    AnalyticVelocityProfile p;
    double smax = 0.0, total = 0.0;
    for (int c = 0; c < 3; ++c) {
      GaussianComponent gc{rng.uni(0.1, 1.0), 0.0, rng.uni(0.8, 2.0)};
      smax = std::max(smax, gc.sigma);
      total += gc.density;
      p.components.push_back(gc);
    }
    for (auto& gc : p.components) gc.density /= total;
    const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 8, 6.0 * smax, 96);
    Fourier fx(g.Nx, g.L);
    const Equilibrium eq =
        make_homogeneous_equilibrium(p, Equilibrium::Kind::custom, g, fx);
    const CasimirProfile prof = casimir_from_equilibrium(eq, g);
    CHECK(first_variation_residual(eq, prof, g) <= 1e-8);
    const DefinitenessReport rep =
        definiteness_report(second_variation_form(eq, prof, g), g);
    CHECK(rep.verdict == Definiteness::positive_definite);
  }
}

TEST_CASE("energy-Casimir functional is conserved along the flow") {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 32, 6.0, 128);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = maxwellian_eq(g, fx);
  const CasimirProfile prof = casimir_from_equilibrium(eq, g);

  ScenarioParams p;
  p.epsilon = 1e-3;
  p.t_end = 10.0;
  State z = initial_state(p, g, fx);
  const double ec0 = energy_casimir_functional(z, prof, g);
  const RunResult rr = run_from(z, p, g, fx);
  REQUIRE(rr.series.error.empty());
  const double ec1 = energy_casimir_functional(rr.final_state, prof, g);
  CHECK(std::abs(ec1 - ec0) <= 1e-5 * std::abs(ec0));
}
