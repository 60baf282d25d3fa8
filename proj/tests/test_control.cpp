#include "doctest.h"

#include <cmath>

#include "mvtk/control.hpp"
#include "test_support.hpp"

using namespace mvtk;

namespace {

const PhaseGrid& grid_es() {
  static const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 32, 6.0, 96);
  return g;
}

std::vector<double> sine_profile(const PhaseGrid& g, int mode = 1) {
  std::vector<double> j(g.Nx);
  for (int ix = 0; ix < g.Nx; ++ix)
    j[ix] = std::sin(2.0 * M_PI * mode * g.x(ix) / g.L);
  return j;
}

}  // namespace

TEST_CASE("channel functional derivatives") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  testsupport::Rng rng(41);
  const State z = testsupport::random_state(g, rng);

  SUBCASE("zero shaping profile gives a zero derivative and generator") {
    const ControlChannel ch = ControlChannel::shaping(std::vector<double>(g.phase_size(), 0.0));
    const FunctionalDerivative d = channel_functional_derivative(ch, z, g);
    CHECK(max_abs(d.d_f) == 0.0);
    CHECK(tangent_norm_inf(control_generator(ch, z, g, fx)) == 0.0);
  }

  SUBCASE("w = 1 gives d_f = f") {
    const ControlChannel ch = ControlChannel::shaping(std::vector<double>(g.phase_size(), 1.0));
    const FunctionalDerivative d = channel_functional_derivative(ch, z, g);
    for (std::size_t k = 0; k < z.f.size(); ++k) CHECK(d.d_f[k] == z.f[k]);
  }

  SUBCASE("finite-difference check of the quadratic channel derivative") {
    testsupport::Rng rng2(43);
    std::vector<double> w = testsupport::random_phase(g, rng2);
    const ControlChannel ch = ControlChannel::shaping(w);
    const auto df = testsupport::random_phase(g, rng2);
    const FunctionalDerivative d = channel_functional_derivative(ch, z, g);
    const double paired = phase_inner(d.d_f, df, g);
    const double h = 1e-4;
    State zp = z, zm = z;
    for (std::size_t k = 0; k < z.f.size(); ++k) {
      zp.f[k] += h * df[k];
      zm.f[k] -= h * df[k];
    }
    const double fd = (channel_value(ch, zp, g) - channel_value(ch, zm, g)) / (2.0 * h);
    CHECK(std::abs(paired - fd) <= 1e-8 * std::max(1.0, std::abs(fd)));
  }

  SUBCASE("current coupling is not state-evaluable") {
    const ControlChannel ch = ControlChannel::current(sine_profile(g));
    CHECK_THROWS_AS(channel_value(ch, z, g), std::invalid_argument);
  }
}

TEST_CASE("control generators") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  testsupport::Rng rng(47);
  const State z = testsupport::random_state(g, rng);

  SUBCASE("current coupling: exactly (0, -J_ext, 0)") {
    const auto j = sine_profile(g);
    const ControlChannel ch = ControlChannel::current(j);
    const StateTangent t = control_generator(ch, z, g, fx);
    CHECK(max_abs(t.df) == 0.0);
    for (int ix = 0; ix < g.Nx; ++ix) CHECK(t.dE1[ix] == -j[ix]);
  }

  SUBCASE("shaping generator conserves total charge") {
    testsupport::Rng rng2(53);
    const ControlChannel ch = ControlChannel::shaping(testsupport::random_phase(g, rng2));
    const StateTangent t = control_generator(ch, z, g, fx);
    std::vector<double> ones(g.phase_size(), 1.0);
    CHECK(std::abs(phase_inner(ones, t.df, g)) <= 1e-10);
  }

  SUBCASE("generators commute with grid translations") {
    testsupport::Rng rng2(59);
    std::vector<double> w = testsupport::random_phase(g, rng2);
    const int shift = 5;
    auto translate_field = [&](const std::vector<double>& a) {
      std::vector<double> out(a.size());
      for (int ix = 0; ix < g.Nx; ++ix) out[ix] = a[(ix + shift) % g.Nx];
      return out;
    };
    auto translate_phase = [&](const std::vector<double>& a) {
      std::vector<double> out(a.size());
      for (int ix = 0; ix < g.Nx; ++ix)
        for (int jv = 0; jv < g.Nv; ++jv)
          out[g.idx(ix, jv)] = a[g.idx((ix + shift) % g.Nx, jv)];
      return out;
    };
    State zt = z;
    zt.f = translate_phase(z.f);
    zt.E1 = translate_field(z.E1);
    const ControlChannel ch = ControlChannel::shaping(w);
    ControlChannel cht = ch;
    cht.w = translate_phase(w);
    const StateTangent a = control_generator(cht, zt, g, fx);
    const StateTangent b = control_generator(ch, z, g, fx);
    double d = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int jv = 0; jv < g.Nv; ++jv)
        d = std::max(d, std::abs(a.df[g.idx(ix, jv)] - b.df[g.idx((ix + shift) % g.Nx, jv)]));
    CHECK(d <= 1e-10);
  }
}

TEST_CASE("controlled_rhs") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  const State z = homogeneous_state(AnalyticVelocityProfile::maxwellian(1.0), g);

  SUBCASE("u = 0 reduces to rhs") {
    std::vector<ControlChannel> cc = {ControlChannel::current(sine_profile(g))};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{});
    const StateTangent a = controlled_rhs(z, g, fx, cc, sched, 0.3);
    const StateTangent b = rhs(z, g, fx);
    CHECK(tangent_norm_inf(tangent_sub(a, b)) == 0.0);
  }

  SUBCASE("constant current channel pulls the equilibrium") {
    std::vector<ControlChannel> cc = {ControlChannel::current(sine_profile(g))};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{ControlSignal::Kind::constant, 0.8, 0, 0, {}, {}});
    const StateTangent t = controlled_rhs(z, g, fx, cc, sched, 0.0);
    for (int ix = 0; ix < g.Nx; ++ix)
      CHECK(t.dE1[ix] == doctest::Approx(-0.8 * sine_profile(g)[ix]).epsilon(1e-14));
  }

  SUBCASE("kinetic Casimirs survive field-sector control") {
    ScenarioParams p;
    p.epsilon = 1e-3;
    p.t_end = 2.0;
    std::vector<ControlChannel> cc = {ControlChannel::current(sine_profile(g))};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{ControlSignal::Kind::sinusoid, 0.2, 1.3, 0.0, {}, {}});
    const RhsFn forcing = make_control_forcing(cc, sched, g, fx);
    const RunResult rr = run(p, g, fx, &forcing);
    REQUIRE(rr.series.error.empty());
    double c2 = 0.0;
    for (double c : rr.series.casimir2)
      c2 = std::max(c2, std::abs(c - rr.series.casimir2.front()));
    CHECK(c2 <= 1e-8 * std::abs(rr.series.casimir2.front()));
  }

  SUBCASE("x-dependent shaping breaks the quadratic Casimir") {
    ScenarioParams p;
    p.epsilon = 1e-3;
    p.t_end = 1.0;
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j)
        w[g.idx(ix, j)] = std::cos(2.0 * M_PI * g.x(ix) / g.L) *
                          std::exp(-0.25 * g.v(j) * g.v(j));
    std::vector<ControlChannel> cc = {ControlChannel::shaping(w)};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{ControlSignal::Kind::constant, 0.5, 0, 0, {}, {}});
    const RhsFn forcing = make_control_forcing(cc, sched, g, fx);
    const RunResult rr = run(p, g, fx, &forcing);
    REQUIRE(rr.series.error.empty());
    double c2 = 0.0;
    for (double c : rr.series.casimir2)
      c2 = std::max(c2, std::abs(c - rr.series.casimir2.front()));
    CHECK(c2 > 1e-7 * std::abs(rr.series.casimir2.front()));
  }
}

TEST_CASE("symmetry_breaking_pairing") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);

  SUBCASE("homogeneous equilibrium is trivially unpaired") {
    const Equilibrium eq = make_homogeneous_equilibrium(
        AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, g, fx);
    const auto rep =
        symmetry_breaking_pairing(ControlChannel::current(sine_profile(g)), eq, g, fx);
    CHECK(rep.trivially_zero);
  }

  SUBCASE("aligned antenna pairs with the broken translation direction") {
    const Equilibrium eq = make_pinned_equilibrium(g, fx, 0.1, 1);
    // dx E0 is cosine-like for the pinned state, so pair with a cosine antenna
    std::vector<double> jc(g.Nx);
    for (int ix = 0; ix < g.Nx; ++ix) jc[ix] = std::cos(2.0 * M_PI * g.x(ix) / g.L);
    const auto aligned =
        symmetry_breaking_pairing(ControlChannel::current(jc), eq, g, fx);
    CHECK_FALSE(aligned.trivially_zero);
    CHECK(std::abs(aligned.value) > 1e-4);
    // spectrally disjoint profile pairs to zero
    const auto disjoint =
        symmetry_breaking_pairing(ControlChannel::current(sine_profile(g, 3)), eq, g, fx);
    CHECK(std::abs(disjoint.value) < 1e-10);
  }
}

TEST_CASE("solve_equilibrium_shift") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, g, fx);
  const CasimirProfile own = casimir_from_equilibrium(eq, g);

  SUBCASE("already critical: u* = 0") {
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j) w[g.idx(ix, j)] = g.v(j) * g.v(j);
    const ShiftReport rep =
        solve_equilibrium_shift(eq, {ControlChannel::shaping(w)}, own, g);
    CHECK(rep.residual_before <= 1e-7);
    CHECK(std::abs(rep.u_star(0)) <= 1e-6);
  }

  SUBCASE("one-channel projection formula") {
    // target profile shifted by a multiple of the channel derivative itself:
    // residual after the projection is exactly zero and u* = -<g0,g1>/<g1,g1>
    const auto f0 = eq.f0_velocity(g);
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j)
        w[g.idx(ix, j)] = std::exp(-0.2 * g.v(j) * g.v(j));
    std::vector<double> s_nodes, pp_nodes;
    for (int j = g.Nv - 1; j >= g.Nv / 2; --j) {
      s_nodes.push_back(f0[j]);
      const double v = g.v(j);
      pp_nodes.push_back(-0.5 * v * v +
                         0.37 * std::exp(-0.2 * v * v) * f0[j]);  // g0 = 0.37 g1
    }
    const CasimirProfile target = CasimirProfile::from_tabulated(s_nodes, pp_nodes);
    const ShiftReport rep =
        solve_equilibrium_shift(eq, {ControlChannel::shaping(w)}, target, g);
    CHECK(rep.u_star(0) == doctest::Approx(-0.37).epsilon(1e-6));
    CHECK(rep.residual_after <= 1e-9 * std::max(1.0, rep.residual_before));
  }

  SUBCASE("drifting equilibrium with rest-frame profile: v-moment channel helps") {
    const Equilibrium drift = make_homogeneous_equilibrium(
        AnalyticVelocityProfile::maxwellian(1.0, 0.3), Equilibrium::Kind::custom, g, fx);
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j) w[g.idx(ix, j)] = g.v(j);
    const ShiftReport rep =
        solve_equilibrium_shift(drift, {ControlChannel::shaping(w)}, own, g);
    CHECK(rep.residual_after < (1.0 - 1e-3) * rep.residual_before);
  }

  SUBCASE("current channels are inert for statics and flagged") {
    const ShiftReport rep = solve_equilibrium_shift(
        eq, {ControlChannel::current(sine_profile(g))}, own, g);
    CHECK(rep.inert_channels == std::vector<int>{0});
    CHECK(rep.rank_deficient);
  }
}

TEST_CASE("controlled_second_variation") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, g, fx);
  const CasimirProfile prof = casimir_from_equilibrium(eq, g);

  SUBCASE("linear channels leave the form untouched") {
    Eigen::VectorXd u(1);
    u << 3.0;
    const auto base = second_variation_form(eq, prof, g);
    const auto ctl = controlled_second_variation(
        eq, u, {ControlChannel::current(sine_profile(g))}, prof, g);
    for (int j = 0; j < g.Nv; ++j) CHECK(ctl.form.f_weight[j] == base.f_weight[j]);
  }

  SUBCASE("nonnegative shaping with positive gain preserves definiteness") {
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j)
        w[g.idx(ix, j)] = std::exp(-0.1 * g.v(j) * g.v(j));
    Eigen::VectorXd u(1);
    u << 2.0;
    const auto ctl =
        controlled_second_variation(eq, u, {ControlChannel::shaping(w)}, prof, g);
    CHECK(ctl.report.verdict == Definiteness::positive_definite);
  }

  SUBCASE("x-dependent shaping weights are rejected for the mode-diagonal form") {
    std::vector<double> w(g.phase_size());
    for (int ix = 0; ix < g.Nx; ++ix)
      for (int j = 0; j < g.Nv; ++j) w[g.idx(ix, j)] = std::cos(g.x(ix));
    Eigen::VectorXd u(1);
    u << 1.0;
    CHECK_THROWS_AS(
        controlled_second_variation(eq, u, {ControlChannel::shaping(w)}, prof, g),
        std::invalid_argument);
  }
}

TEST_CASE("control signals") {
  ControlSignal c{ControlSignal::Kind::constant, 0.7, 0, 0, {}, {}};
  CHECK(c(0.0) == 0.7);
  CHECK(c(13.0) == 0.7);
  ControlSignal s{ControlSignal::Kind::sinusoid, 2.0, 3.0, 0.5, {}, {}};
  CHECK(s(1.2) == doctest::Approx(2.0 * std::sin(3.0 * 1.2 + 0.5)));
  ControlSignal pw;
  pw.kind = ControlSignal::Kind::piecewise;
  pw.times = {0.0, 1.0, 2.5};
  pw.values = {0.2, -0.4, 1.0};
  CHECK(pw(-0.1) == 0.0);
  CHECK(pw(0.5) == 0.2);
  CHECK(pw(1.0) == -0.4);
  CHECK(pw(2.4) == -0.4);
  CHECK(pw(7.0) == 1.0);
}

TEST_CASE("two-component antenna in the electromagnetic configuration") {
  const PhaseGrid g = PhaseGrid::em_1d2v(2 * M_PI, 8, 4.0, 12);
  Fourier fx(g.Nx, g.L);
  testsupport::Rng rng(71);
  const State z = testsupport::random_state(g, rng);
  std::vector<double> j1(g.Nx), j2(g.Nx);
  for (int ix = 0; ix < g.Nx; ++ix) {
    j1[ix] = std::sin(g.x(ix));
    j2[ix] = std::cos(g.x(ix));
  }
  const ControlChannel ch = ControlChannel::current2(j1, j2);
  const StateTangent t = control_generator(ch, z, g, fx);
  CHECK(max_abs(t.df) == 0.0);
  CHECK(max_abs(t.dB3) == 0.0);
  for (int ix = 0; ix < g.Nx; ++ix) {
    CHECK(t.dE1[ix] == -j1[ix]);
    CHECK(t.dE2[ix] == -j2[ix]);
  }
}

TEST_CASE("accumulated control power matches the energy change over a run") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  ScenarioParams p;
  p.epsilon = 1e-3;
  p.t_end = 2.0;
  p.dt = 0.02;
  std::vector<double> jc(g.Nx);
  for (int ix = 0; ix < g.Nx; ++ix) jc[ix] = std::cos(2.0 * M_PI * g.x(ix) / g.L);
  std::vector<ControlChannel> cc = {ControlChannel::current(jc)};
  ControlSchedule sched;
  sched.u.push_back(ControlSignal{ControlSignal::Kind::constant, 0.5, 0, 0, {}, {}});

  State z = initial_state(p, g, fx);
  const double h0 = total_energy(z, g);
  RhsFn f = [&](const State& s, double t) { return controlled_rhs(s, g, fx, cc, sched, t); };
  const int nsteps = 100;
  double work = 0.0;
  double p_prev = sched(0, 0.0) * channel_power(cc[0], z, g, fx);
  for (int n = 0; n < nsteps; ++n) {
    z = step_rk4(z, g, 0.0 + n * p.dt, p.dt, f).z;
    const double p_next = sched(0, (n + 1) * p.dt) * channel_power(cc[0], z, g, fx);
    work += 0.5 * p.dt * (p_prev + p_next);  // trapezoid in time
    p_prev = p_next;
  }
  const double dh = total_energy(z, g) - h0;
  CHECK(std::abs(dh - work) <= 1e-4 * std::abs(dh));
}

TEST_CASE("controlled Lie-Poisson consistency") {
  // the vector field of H + sum u_a B_a equals the free field plus the
  // weighted generators: the bracket assembly is linear in the derivative
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  testsupport::Rng rng(61);
  const State z = testsupport::random_state(g, rng);
  std::vector<double> w = testsupport::random_phase(g, rng);
  const ControlChannel sh = ControlChannel::shaping(w);
  const ControlChannel cur = ControlChannel::current(sine_profile(g));
  const double u1 = 0.7, u2 = -1.3;

  FunctionalDerivative combined = energy_derivative(z, g);
  const FunctionalDerivative b1 = channel_functional_derivative(sh, z, g);
  const FunctionalDerivative b2 = channel_functional_derivative(cur, z, g);
  for (std::size_t k = 0; k < combined.d_f.size(); ++k)
    combined.d_f[k] += u1 * b1.d_f[k];
  combined.d_A1.assign(g.Nx, 0.0);
  for (int ix = 0; ix < g.Nx; ++ix) combined.d_A1[ix] = u2 * b2.d_A1[ix];

  const StateTangent lhs = hamiltonian_vector_field(combined, z, g, fx);
  StateTangent rhs_sum = hamiltonian_vector_field(energy_derivative(z, g), z, g, fx);
  const StateTangent g1 = control_generator(sh, z, g, fx);
  const StateTangent g2 = control_generator(cur, z, g, fx);
  for (std::size_t k = 0; k < rhs_sum.df.size(); ++k)
    rhs_sum.df[k] += u1 * g1.df[k] + u2 * g2.df[k];
  for (int ix = 0; ix < g.Nx; ++ix)
    rhs_sum.dE1[ix] += u1 * g1.dE1[ix] + u2 * g2.dE1[ix];

  CHECK(tangent_norm_inf(tangent_sub(lhs, rhs_sum)) <= 1e-10);
}

TEST_CASE("power balance along a controlled step") {
  const PhaseGrid& g = grid_es();
  Fourier fx(g.Nx, g.L);
  ScenarioParams p;
  p.epsilon = 1e-3;
  const State z0 = initial_state(p, g, fx);
  std::vector<ControlChannel> cc = {ControlChannel::current(sine_profile(g))};
  ControlSchedule sched;
  sched.u.push_back(ControlSignal{ControlSignal::Kind::constant, 1.0, 0, 0, {}, {}});

  const double dt = 0.005;
  RhsFn f = [&](const State& s, double t) { return controlled_rhs(s, g, fx, cc, sched, t); };
  const StateTangent k1 = f(z0, 0.0);
  const State z2 = axpy(z0, 0.5 * dt, k1);
  const StateTangent k2 = f(z2, 0.5 * dt);
  const State z3 = axpy(z0, 0.5 * dt, k2);
  const StateTangent k3 = f(z3, 0.5 * dt);
  const State z4 = axpy(z0, dt, k3);
  const State z1 = step_rk4(z0, g, 0.0, dt, f).z;

  auto power = [&](const State& s) { return channel_power(cc[0], s, g, fx); };
  const double work =
      dt / 6.0 * (power(z0) + 2.0 * power(z2) + 2.0 * power(z3) + power(z4));
  const double dh = total_energy(z1, g) - total_energy(z0, g);
  CHECK(std::abs(dh - work) <= 1e-6 * std::abs(dh));
}
