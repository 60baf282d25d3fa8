#ifndef MVTK_ENERGY_CASIMIR_HPP
#define MVTK_ENERGY_CASIMIR_HPP

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvtk/equilibrium.hpp"
#include "mvtk/grid.hpp"

namespace mvtk {

struct NonMonotoneCasimirError : std::runtime_error {
  NonMonotoneCasimirError(const std::string& msg, double vlo, double vhi)
      : std::runtime_error(msg), v_lo(vlo), v_hi(vhi) {}
  double v_lo, v_hi;  // velocity interval where dF0/de changes sign
};

struct DegenerateCasimirError : std::runtime_error {
  DegenerateCasimirError(const std::string& msg, double vlo, double vhi)
      : std::runtime_error(msg), v_lo(vlo), v_hi(vhi) {}
  double v_lo, v_hi;  // flat interval, dF0/de = 0
};

// Entropy-type Casimir density phi tabulated against s = F0 values.  Built so
// that phi'(F0(v)) = -v^2/2, which makes the equilibrium a critical point of
// H + int phi(f).  Stored as a monotone cubic (Fritsch-Carlson) interpolant
// of phi' in t = ln s; phi''(s) = (d phi'/dt) / s is then positive exactly
// when F0 decreases strictly with energy.  Queries outside [s_min, s_max]
// extend phi' linearly in t (exact for a Maxwellian).
class CasimirProfile {
 public:
  double phi(double s) const;
  double phi_prime(double s) const;
  double phi_double_prime(double s) const;
  double s_min() const { return smin_; }
  double s_max() const { return smax_; }

  static CasimirProfile from_tabulated(std::vector<double> s_nodes,
                                       std::vector<double> phi_prime_nodes);

 private:
  friend CasimirProfile casimir_from_equilibrium(const Equilibrium&, const PhaseGrid&);
  std::vector<double> t_, y_, d_;   // ln s nodes, phi' values, dphi'/dt slopes
  std::vector<double> phi_nodes_;   // cumulative phi at the nodes
  double smin_ = 0.0, smax_ = 0.0;

  int segment(double t) const;
  void build();
};

// Inverts s = F0(v(e)) on the grid.  Requires F0 even in v and strictly
// decreasing in |v|; otherwise throws NonMonotoneCasimirError (interval where
// the profile rises with |v|) or DegenerateCasimirError (flat stretch).
CasimirProfile casimir_from_equilibrium(const Equilibrium& eq, const PhaseGrid& grid);

// Same construction from a velocity-grid sampling of F0.
CasimirProfile casimir_from_f0(const std::vector<double>& f0, const PhaseGrid& grid);

// || v^2/2 + phi'(F0(v)) ||_inf over the grid plus ||E0||_inf.
double first_variation_residual(const Equilibrium& eq, const CasimirProfile& profile,
                                const PhaseGrid& grid);

// Diagonal second variation d2(H + C): weights phi''(F0(v_j)) on the delta-f
// block (quadrature-weighted) and unit weights on the field block.
struct SecondVariationForm {
  std::vector<double> f_weight;  // per velocity node: phi''(F0(v_j))
  double field_weight = 1.0;

  double evaluate(const StateTangent& dz, const PhaseGrid& grid) const;
};

SecondVariationForm second_variation_form(const Equilibrium& eq,
                                          const CasimirProfile& profile,
                                          const PhaseGrid& grid);

enum class Definiteness { positive_definite, indefinite, degenerate };

std::string to_string(Definiteness v);

struct DefinitenessReport {
  double min_eigenvalue = 0.0;
  int min_mode = 0;
  Definiteness verdict = Definiteness::degenerate;
  int projector_corank = 0;
  std::string to_json() const;
};

// Smallest Rayleigh quotient of the form over Gauss-compatible perturbations
// (delta E slaved to delta f per Fourier mode, zero-mean gauge on mode 0),
// optionally restricted by an effective projector acting on the per-mode
// (delta f, delta E) block.  Mode m is scanned over 0..Nx/2.
DefinitenessReport definiteness_report(const SecondVariationForm& form,
                                       const PhaseGrid& grid,
                                       const Eigen::MatrixXcd* projector = nullptr);

// E_C = H + int phi(f): conserved along the flow up to energy/Casimir drift.
double energy_casimir_functional(const State& z, const CasimirProfile& profile,
                                 const PhaseGrid& grid);

}  // namespace mvtk

#endif
