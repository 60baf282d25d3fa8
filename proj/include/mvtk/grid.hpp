#ifndef MVTK_GRID_HPP
#define MVTK_GRID_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace mvtk {

enum class GridConfig { ES_1D1V, EM_1D2V };

std::string to_string(GridConfig c);

// Periodic-in-x, truncated-in-v phase-space grid.
//
// x_i = i * L / Nx  (i = 0..Nx-1, periodic)
// v_j = -v_max + j * dv,  dv = 2 v_max / (Nv - 1)  (nodes include both ends)
//
// Velocity quadrature is uniform trapezoid (half weights at the cutoff),
// spatial quadrature is the plain Riemann sum dx * sum.
struct PhaseGrid {
  GridConfig config = GridConfig::ES_1D1V;
  double L = 4.0 * 3.14159265358979323846;
  int Nx = 64;
  double v_max = 6.0;
  int Nv = 256;
  double q = 1.0;                      // particle charge (sign studies)
  bool background_neutralizing = true; // subtract mean charge density

  PhaseGrid() = default;
  PhaseGrid(GridConfig cfg, double L_, int Nx_, double vmax_, int Nv_,
            double q_ = 1.0, bool neutralize = true);

  static PhaseGrid es_1d1v(double L_, int Nx_, double vmax_, int Nv_);
  static PhaseGrid em_1d2v(double L_, int Nx_, double vmax_, int Nv_);

  int vdim() const { return config == GridConfig::EM_1D2V ? 2 : 1; }
  double dx() const { return L / Nx; }
  double dv() const { return 2.0 * v_max / (Nv - 1); }
  double x(int i) const { return i * dx(); }
  double v(int j) const { return -v_max + j * dv(); }

  // number of velocity nodes per spatial point (Nv or Nv^2)
  std::size_t vcells() const;
  // total phase-space nodes
  std::size_t phase_size() const { return static_cast<std::size_t>(Nx) * vcells(); }

  std::size_t idx(int ix, int j) const {          // ES_1D1V
    return static_cast<std::size_t>(ix) * Nv + j;
  }
  std::size_t idx(int ix, int j1, int j2) const { // EM_1D2V
    return (static_cast<std::size_t>(ix) * Nv + j1) * Nv + j2;
  }

  // trapezoid weight of velocity node j, already multiplied by dv
  double vweight(int j) const {
    return (j == 0 || j == Nv - 1) ? 0.5 * dv() : dv();
  }
  std::vector<double> velocity_nodes() const;
  std::vector<double> velocity_weights() const;
};

// Reduced Eulerian state z = (f, E, B).  In ES_1D1V only E1 is present;
// EM_1D2V carries (E1, E2, B3).  Immutable by convention: evolution maps
// produce new states.
struct State {
  std::vector<double> f;
  std::vector<double> E1;
  std::vector<double> E2;
  std::vector<double> B3;

  static State zeros(const PhaseGrid& grid);
};

struct Moments {
  std::vector<double> rho;             // Nx
  std::vector<std::vector<double>> j;  // one component per velocity dimension
};

// Tangent vector at a state, same shapes as the State fields.
struct StateTangent {
  std::vector<double> df;
  std::vector<double> dE1;
  std::vector<double> dE2;
  std::vector<double> dB3;

  static StateTangent zeros(const PhaseGrid& grid);
};

void validate_phase_shape(const std::vector<double>& f, const PhaseGrid& grid,
                          const char* what);
void validate_field_shape(const std::vector<double>& g, const PhaseGrid& grid,
                          const char* what);
void validate_state(const State& z, const PhaseGrid& grid);

// rho(x) = int f dv (trapezoid); mean subtracted when the grid carries a
// neutralizing background.
std::vector<double> charge_density(const std::vector<double>& f, const PhaseGrid& grid);

// j_k(x) = int v_k f dv.
std::vector<std::vector<double>> current_density(const std::vector<double>& f,
                                                 const PhaseGrid& grid);

Moments moments(const std::vector<double>& f, const PhaseGrid& grid);

// H = int 1/2 |v|^2 f dx dv + 1/2 int (|E|^2 + |B|^2) dx
double total_energy(const State& z, const PhaseGrid& grid);

double kinetic_energy(const std::vector<double>& f, const PhaseGrid& grid);
double field_energy(const State& z, const PhaseGrid& grid);

// int f^p dx dv.  p = 1 is the total charge/mass.  Fractional p requires
// f >= 0 (throws std::domain_error otherwise).
double casimir_lp(const std::vector<double>& f, const PhaseGrid& grid, double p);

// int phi(f) dx dv for a tabulated/callable phi (used by energy-Casimir
// conservation monitors).
template <class Fn>
double integral_of(const std::vector<double>& f, const PhaseGrid& grid, Fn&& phi);

double min_f(const std::vector<double>& f);
double max_abs(const std::vector<double>& g);

// weighted L2 and Linf norms over the full state/tangent
double state_norm2(const State& z, const PhaseGrid& grid);
double tangent_norm2(const StateTangent& t, const PhaseGrid& grid);
double tangent_norm_inf(const StateTangent& t);

// l2 pairing <Fd-shaped, tangent> with quadrature weights: used for duality
// and symmetry-breaking pairings.
double phase_inner(const std::vector<double>& a, const std::vector<double>& b,
                   const PhaseGrid& grid);
double field_inner(const std::vector<double>& a, const std::vector<double>& b,
                   const PhaseGrid& grid);

template <class Fn>
double integral_of(const std::vector<double>& f, const PhaseGrid& grid, Fn&& phi) {
  validate_phase_shape(f, grid, "f");
  const double dxw = grid.dx();
  double acc = 0.0;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j)
        acc += grid.vweight(j) * phi(f[grid.idx(ix, j)]);
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2)
          acc += grid.vweight(j1) * grid.vweight(j2) * phi(f[grid.idx(ix, j1, j2)]);
  }
  return acc * dxw;
}

}  // namespace mvtk

#endif
