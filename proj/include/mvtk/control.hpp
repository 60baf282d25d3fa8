#ifndef MVTK_CONTROL_HPP
#define MVTK_CONTROL_HPP

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "mvtk/bracket.hpp"
#include "mvtk/dynamics.hpp"
#include "mvtk/energy_casimir.hpp"
#include "mvtk/equilibrium.hpp"
#include "mvtk/grid.hpp"

namespace mvtk {

// Antenna coupling channel.  current_coupling carries a prescribed spatial
// current shape per field component and acts as the Ampere-law source
// -u(t) J_ext; it is affine in the vector potential, so its derivative lives
// in the d_A slot and is never reconstructed as a functional of (f, E, B).
// casimir_shaping carries a phase-space weight w and the quadratic functional
// B(z) = 1/2 int w f^2 (an artifact extension of the entropy-type Casimirs;
// flagged non-core in reports).
struct ControlChannel {
  enum class Kind { current_coupling, casimir_shaping };

  Kind kind = Kind::current_coupling;
  std::vector<std::vector<double>> j_profile;  // per field component, Nx each
  std::vector<double> w;                       // phase grid weight
  std::string label;

  static ControlChannel current(std::vector<double> j1, std::string label = "antenna");
  static ControlChannel current2(std::vector<double> j1, std::vector<double> j2,
                                 std::string label = "antenna");
  static ControlChannel shaping(std::vector<double> w, std::string label = "shaping");
};

// u_a(t): piecewise-constant table or sinusoid, bounded by `amplitude`.
struct ControlSignal {
  enum class Kind { constant, sinusoid, piecewise };
  Kind kind = Kind::constant;
  double amplitude = 0.0;                  // constant value / sinusoid amplitude
  double frequency = 0.0, phase = 0.0;     // sinusoid
  std::vector<double> times, values;       // piecewise-constant knots

  double operator()(double t) const;
};

struct ControlSchedule {
  std::vector<ControlSignal> u;
  double operator()(std::size_t a, double t) const { return u.at(a)(t); }
};

// Evaluable value of the coupling functional; only quadratic channels admit
// one (current coupling is affine in A, which the reduced state does not carry).
bool channel_evaluable(const ControlChannel& ch);
double channel_value(const ControlChannel& ch, const State& z, const PhaseGrid& grid);

FunctionalDerivative channel_functional_derivative(const ControlChannel& ch,
                                                   const State& z, const PhaseGrid& grid);

// Reduced control generator F_a(z) = X_{B_a}(z); for current coupling this is
// exactly (df, dE, dB) = (0, -J_ext, 0).
StateTangent control_generator(const ControlChannel& ch, const State& z,
                               const PhaseGrid& grid, const Fourier& fx);

// rhs(z) + sum_a u_a(t) F_a(z)
StateTangent controlled_rhs(const State& z, const PhaseGrid& grid, const Fourier& fx,
                            const std::vector<ControlChannel>& channels,
                            const ControlSchedule& schedule, double t);

// Instantaneous power fed by channel a: mv_bracket(dH, dB_a) = <dH, F_a>.
double channel_power(const ControlChannel& ch, const State& z, const PhaseGrid& grid,
                     const Fourier& fx);

// L2-grid pairing of the control generator with the x-translation direction
// of the equilibrium (computable proxy for the effective-form pairing of the
// stabilization theorem; reported as such).
struct PairingReport {
  double value = 0.0;
  bool trivially_zero = false;  // homogeneous equilibrium
};
PairingReport symmetry_breaking_pairing(const ControlChannel& ch, const Equilibrium& eq,
                                        const PhaseGrid& grid, const Fourier& fx);

// Least-squares equilibrium shift: minimize || g0 + sum_a u_a g_a || over u,
// where g0 is the first-variation residual field of H + C at the equilibrium
// and g_a the channel derivative fields.  Current-coupling channels carry no
// static first variation in the reduced variables and are flagged inert.
struct ShiftReport {
  Eigen::VectorXd u_star;
  double residual_before = 0.0;
  double residual_after = 0.0;
  bool rank_deficient = false;   // minimum-norm solution returned
  std::vector<int> inert_channels;
  std::string to_json() const;
};

ShiftReport solve_equilibrium_shift(const Equilibrium& eq,
                                    const std::vector<ControlChannel>& channels,
                                    const CasimirProfile& profile, const PhaseGrid& grid);

// Q_u = d2(H + C) + sum_a u*_a d2 B_a (zero for linear channels, the shaping
// weight for quadratic ones); requires v-dependent-only shaping weights.
struct ControlledSecondVariation {
  SecondVariationForm form;
  DefinitenessReport report;
};

ControlledSecondVariation controlled_second_variation(
    const Equilibrium& eq, const Eigen::VectorXd& u_star,
    const std::vector<ControlChannel>& channels, const CasimirProfile& profile,
    const PhaseGrid& grid, const Eigen::MatrixXcd* projector = nullptr);

// Adaptor: forcing tangent sum_a u_a(t) F_a(z) for the dynamics run hook.
RhsFn make_control_forcing(const std::vector<ControlChannel>& channels,
                           const ControlSchedule& schedule, const PhaseGrid& grid,
                           const Fourier& fx);

}  // namespace mvtk

#endif
