#include "mvtk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvtk {

std::string to_string(GridConfig c) {
  return c == GridConfig::ES_1D1V ? "es_1d1v" : "em_1d2v";
}

PhaseGrid::PhaseGrid(GridConfig cfg, double L_, int Nx_, double vmax_, int Nv_,
                     double q_, bool neutralize)
    : config(cfg), L(L_), Nx(Nx_), v_max(vmax_), Nv(Nv_), q(q_),
      background_neutralizing(neutralize) {
  if (!(L > 0.0)) throw std::invalid_argument("PhaseGrid: L must be positive");
  if (!(v_max > 0.0)) throw std::invalid_argument("PhaseGrid: v_max must be positive");
  if (Nx < 4 || Nx % 2 != 0)
    throw std::invalid_argument("PhaseGrid: Nx must be >= 4 and even");
  if (Nv < 4) throw std::invalid_argument("PhaseGrid: Nv must be >= 4");
}

PhaseGrid PhaseGrid::es_1d1v(double L_, int Nx_, double vmax_, int Nv_) {
  return PhaseGrid(GridConfig::ES_1D1V, L_, Nx_, vmax_, Nv_);
}

PhaseGrid PhaseGrid::em_1d2v(double L_, int Nx_, double vmax_, int Nv_) {
  return PhaseGrid(GridConfig::EM_1D2V, L_, Nx_, vmax_, Nv_);
}

std::size_t PhaseGrid::vcells() const {
  std::size_t n = static_cast<std::size_t>(Nv);
  return config == GridConfig::EM_1D2V ? n * n : n;
}

std::vector<double> PhaseGrid::velocity_nodes() const {
  std::vector<double> vs(Nv);
  for (int j = 0; j < Nv; ++j) vs[j] = v(j);
  return vs;
}

std::vector<double> PhaseGrid::velocity_weights() const {
  std::vector<double> ws(Nv);
  for (int j = 0; j < Nv; ++j) ws[j] = vweight(j);
  return ws;
}

State State::zeros(const PhaseGrid& grid) {
  State z;
  z.f.assign(grid.phase_size(), 0.0);
  z.E1.assign(grid.Nx, 0.0);
  if (grid.config == GridConfig::EM_1D2V) {
    z.E2.assign(grid.Nx, 0.0);
    z.B3.assign(grid.Nx, 0.0);
  }
  return z;
}

StateTangent StateTangent::zeros(const PhaseGrid& grid) {
  StateTangent t;
  t.df.assign(grid.phase_size(), 0.0);
  t.dE1.assign(grid.Nx, 0.0);
  if (grid.config == GridConfig::EM_1D2V) {
    t.dE2.assign(grid.Nx, 0.0);
    t.dB3.assign(grid.Nx, 0.0);
  }
  return t;
}

void validate_phase_shape(const std::vector<double>& f, const PhaseGrid& grid,
                          const char* what) {
  if (f.size() != grid.phase_size())
    throw std::invalid_argument(std::string(what) + ": phase-grid shape mismatch");
}

void validate_field_shape(const std::vector<double>& g, const PhaseGrid& grid,
                          const char* what) {
  if (g.size() != static_cast<std::size_t>(grid.Nx))
    throw std::invalid_argument(std::string(what) + ": spatial-grid shape mismatch");
}

void validate_state(const State& z, const PhaseGrid& grid) {
  validate_phase_shape(z.f, grid, "State.f");
  validate_field_shape(z.E1, grid, "State.E1");
  if (grid.config == GridConfig::EM_1D2V) {
    validate_field_shape(z.E2, grid, "State.E2");
    validate_field_shape(z.B3, grid, "State.B3");
  } else {
    if (!z.E2.empty() || !z.B3.empty())
      throw std::invalid_argument("State: E2/B3 must be absent in ES_1D1V");
  }
}

std::vector<double> charge_density(const std::vector<double>& f, const PhaseGrid& grid) {
  validate_phase_shape(f, grid, "f");
  std::vector<double> rho(grid.Nx, 0.0);
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      double acc = 0.0;
      for (int j = 0; j < grid.Nv; ++j) acc += grid.vweight(j) * f[grid.idx(ix, j)];
      rho[ix] = acc;
    }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      double acc = 0.0;
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double w1 = grid.vweight(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2)
          acc += w1 * grid.vweight(j2) * f[grid.idx(ix, j1, j2)];
      }
      rho[ix] = acc;
    }
  }
  if (grid.background_neutralizing) {
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= grid.Nx;
    for (double& r : rho) r -= mean;
  }
  return rho;
}

std::vector<std::vector<double>> current_density(const std::vector<double>& f,
                                                 const PhaseGrid& grid) {
  validate_phase_shape(f, grid, "f");
  std::vector<std::vector<double>> j(grid.vdim(), std::vector<double>(grid.Nx, 0.0));
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      double acc = 0.0;
      for (int jj = 0; jj < grid.Nv; ++jj)
        acc += grid.vweight(jj) * grid.v(jj) * f[grid.idx(ix, jj)];
      j[0][ix] = acc;
    }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      double a1 = 0.0, a2 = 0.0;
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double w1 = grid.vweight(j1);
        const double v1 = grid.v(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double wf = w1 * grid.vweight(j2) * f[grid.idx(ix, j1, j2)];
          a1 += v1 * wf;
          a2 += grid.v(j2) * wf;
        }
      }
      j[0][ix] = a1;
      j[1][ix] = a2;
    }
  }
  return j;
}

Moments moments(const std::vector<double>& f, const PhaseGrid& grid) {
  Moments m;
  m.rho = charge_density(f, grid);
  m.j = current_density(f, grid);
  return m;
}

double kinetic_energy(const std::vector<double>& f, const PhaseGrid& grid) {
  validate_phase_shape(f, grid, "f");
  double acc = 0.0;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j) {
        const double vj = grid.v(j);
        acc += grid.vweight(j) * 0.5 * vj * vj * f[grid.idx(ix, j)];
      }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double v1 = grid.v(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double v2 = grid.v(j2);
          acc += grid.vweight(j1) * grid.vweight(j2) * 0.5 * (v1 * v1 + v2 * v2) *
                 f[grid.idx(ix, j1, j2)];
        }
      }
  }
  return acc * grid.dx();
}

double field_energy(const State& z, const PhaseGrid& grid) {
  double acc = 0.0;
  for (int ix = 0; ix < grid.Nx; ++ix) {
    double s = z.E1[ix] * z.E1[ix];
    if (grid.config == GridConfig::EM_1D2V)
      s += z.E2[ix] * z.E2[ix] + z.B3[ix] * z.B3[ix];
    acc += s;
  }
  return 0.5 * acc * grid.dx();
}

double total_energy(const State& z, const PhaseGrid& grid) {
  validate_state(z, grid);
  return kinetic_energy(z.f, grid) + field_energy(z, grid);
}

double casimir_lp(const std::vector<double>& f, const PhaseGrid& grid, double p) {
  if (!(p >= 1.0)) throw std::domain_error("casimir_lp: p must be >= 1");
  const bool integral_p = std::abs(p - std::round(p)) < 1e-12;
  if (!integral_p) {
    for (double x : f)
      if (x < 0.0)
        throw std::domain_error("casimir_lp: fractional p requires f >= 0");
  }
  const long ip = std::lround(p);
  if (integral_p && ip == 1) return integral_of(f, grid, [](double x) { return x; });
  if (integral_p && ip == 2) return integral_of(f, grid, [](double x) { return x * x; });
  if (integral_p)
    return integral_of(f, grid, [ip](double x) {
      double r = 1.0;
      for (long k = 0; k < ip; ++k) r *= x;
      return r;
    });
  return integral_of(f, grid, [p](double x) { return std::pow(x, p); });
}

double min_f(const std::vector<double>& f) {
  return *std::min_element(f.begin(), f.end());
}

double max_abs(const std::vector<double>& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

double phase_inner(const std::vector<double>& a, const std::vector<double>& b,
                   const PhaseGrid& grid) {
  validate_phase_shape(a, grid, "a");
  validate_phase_shape(b, grid, "b");
  double acc = 0.0;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j) {
        const std::size_t k = grid.idx(ix, j);
        acc += grid.vweight(j) * a[k] * b[k];
      }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const std::size_t k = grid.idx(ix, j1, j2);
          acc += grid.vweight(j1) * grid.vweight(j2) * a[k] * b[k];
        }
  }
  return acc * grid.dx();
}

double field_inner(const std::vector<double>& a, const std::vector<double>& b,
                   const PhaseGrid& grid) {
  validate_field_shape(a, grid, "a");
  validate_field_shape(b, grid, "b");
  double acc = 0.0;
  for (int ix = 0; ix < grid.Nx; ++ix) acc += a[ix] * b[ix];
  return acc * grid.dx();
}

double state_norm2(const State& z, const PhaseGrid& grid) {
  double s = phase_inner(z.f, z.f, grid) + field_inner(z.E1, z.E1, grid);
  if (grid.config == GridConfig::EM_1D2V)
    s += field_inner(z.E2, z.E2, grid) + field_inner(z.B3, z.B3, grid);
  return std::sqrt(s);
}

double tangent_norm2(const StateTangent& t, const PhaseGrid& grid) {
  double s = phase_inner(t.df, t.df, grid) + field_inner(t.dE1, t.dE1, grid);
  if (grid.config == GridConfig::EM_1D2V)
    s += field_inner(t.dE2, t.dE2, grid) + field_inner(t.dB3, t.dB3, grid);
  return std::sqrt(s);
}

double tangent_norm_inf(const StateTangent& t) {
  double m = max_abs(t.df);
  m = std::max(m, max_abs(t.dE1));
  m = std::max(m, max_abs(t.dE2));
  m = std::max(m, max_abs(t.dB3));
  return m;
}

}  // namespace mvtk
