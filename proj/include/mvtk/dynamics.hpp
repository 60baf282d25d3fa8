#ifndef MVTK_DYNAMICS_HPP
#define MVTK_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvtk/bracket.hpp"
#include "mvtk/grid.hpp"
#include "mvtk/profiles.hpp"
#include "mvtk/spectral.hpp"

namespace mvtk {

// External current density per field component (ES: one entry, EM: two).
using ExternalCurrent = std::vector<std::vector<double>>;

// Right-hand side of the semi-discrete Maxwell-Vlasov system in Ampere form.
//   ES_1D1V:  df = -v dx f - q E dv f,     dE = -q (j - jbar) - j_ext
//   EM_1D2V:  df = -v1 dx f - q (E + v x B) . dv f,
//             dE1 = -q j1 - j_ext1, dE2 = -dx B3 - q j2 - j_ext2, dB3 = -dx E2
// Gauss's law is not imposed; it is a flow invariant monitored by
// gauss_residual.
StateTangent rhs(const State& z, const PhaseGrid& grid, const Fourier& fx,
                 const ExternalCurrent* j_ext = nullptr);

using RhsFn = std::function<StateTangent(const State&, double t)>;

struct StepResult {
  State z;
  bool cfl_warning = false;
};

// Classical RK4 step; throws std::runtime_error on NaN.  The CFL-type bound
// dt <= min(dx / v_max, dv / max|E|) is checked and flagged, not enforced.
StepResult step_rk4(const State& z, const PhaseGrid& grid, double t, double dt,
                    const RhsFn& f);
StepResult step_rk4(const State& z, const PhaseGrid& grid, const Fourier& fx,
                    double t, double dt, const ExternalCurrent* j_ext = nullptr);

double cfl_bound(const State& z, const PhaseGrid& grid);

// Linf violation of the neutralized periodic Gauss law, |dx E1 - q (rho - rhobar)|.
// In EM_1D2V div B vanishes identically in the reduced geometry and is
// reported as exact zero alongside.
struct GaussReport {
  double e_residual = 0.0;
  double divb_residual = 0.0;
};
GaussReport gauss_residual(const State& z, const PhaseGrid& grid, const Fourier& fx);

enum class PerturbationType { density, velocity };
enum class EquilibriumKind { maxwellian, two_stream, bump_on_tail };

struct ScenarioParams {
  double dt = 0.02;
  double t_end = 20.0;
  int k_mode = 1;                 // perturbed Fourier mode
  double epsilon = 1e-3;          // perturbation amplitude
  PerturbationType perturbation = PerturbationType::density;
  EquilibriumKind equilibrium = EquilibriumKind::maxwellian;
  double sigma = 1.0;             // thermal spread
  double u0 = 2.4;                // two-stream beam speed / bump drift
  double bump_density = 0.1;      // bump-on-tail parameters
  double bump_sigma = 0.5;
  int cadence = 1;                // record every n-th step
};

AnalyticVelocityProfile make_profile(const ScenarioParams& p);

// Spatially uniform state f(x,v) = F0(v) (no perturbation, zero fields).
State homogeneous_state(const AnalyticVelocityProfile& F0, const PhaseGrid& grid);

// Equilibrium + perturbation + spectral Poisson solve for the initial field.
State initial_state(const ScenarioParams& p, const PhaseGrid& grid, const Fourier& fx);

struct DiagnosticSeries {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> casimir1;
  std::vector<double> casimir2;
  std::vector<double> gauss;
  std::vector<std::vector<double>> mode_energy;  // 4 columns
  std::vector<double> fmin;
  bool cfl_warning = false;
  double dt_effective = 0.0;
  std::string error;  // empty unless the run aborted; series is then partial

  std::string to_csv() const;
  std::string to_json() const;
  void write_csv(const std::string& path) const;
};

struct RunResult {
  DiagnosticSeries series;
  State final_state;
};

// Time-step `z0` to t_end recording diagnostics at the given cadence.  The
// requested dt is clamped to 80% of the initial CFL bound when it exceeds it
// (flagged in the series).  `extra` adds a forcing tangent (antenna controls).
RunResult run(const ScenarioParams& p, const PhaseGrid& grid, const Fourier& fx,
              const RhsFn* extra = nullptr);
RunResult run_from(const State& z0, const ScenarioParams& p, const PhaseGrid& grid,
                   const Fourier& fx, const RhsFn* extra = nullptr);

// state algebra used by the integrator and tests
State axpy(const State& z, double a, const StateTangent& t);
StateTangent tangent_sub(const StateTangent& a, const StateTangent& b);

}  // namespace mvtk

#endif
