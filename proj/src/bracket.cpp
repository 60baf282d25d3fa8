#include "mvtk/bracket.hpp"

#include <cmath>
#include <stdexcept>

namespace mvtk {

FunctionalDerivative FunctionalDerivative::zeros(const PhaseGrid& grid) {
  FunctionalDerivative d;
  d.d_f.assign(grid.phase_size(), 0.0);
  d.d_E1.assign(grid.Nx, 0.0);
  if (grid.config == GridConfig::EM_1D2V) {
    d.d_E2.assign(grid.Nx, 0.0);
    d.d_B3.assign(grid.Nx, 0.0);
  }
  return d;
}

FunctionalDerivative energy_derivative(const State& z, const PhaseGrid& grid) {
  validate_state(z, grid);
  FunctionalDerivative d = FunctionalDerivative::zeros(grid);
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j) {
        const double vj = grid.v(j);
        d.d_f[grid.idx(ix, j)] = 0.5 * vj * vj;
      }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double v1 = grid.v(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double v2 = grid.v(j2);
          d.d_f[grid.idx(ix, j1, j2)] = 0.5 * (v1 * v1 + v2 * v2);
        }
      }
    d.d_E2 = z.E2;
    d.d_B3 = z.B3;
  }
  d.d_E1 = z.E1;
  return d;
}

FunctionalDerivative lp_casimir_derivative(const State& z, const PhaseGrid& grid,
                                           double p) {
  FunctionalDerivative d = FunctionalDerivative::zeros(grid);
  const long ip = std::lround(p);
  const bool integral_p = std::abs(p - ip) < 1e-12;
  for (std::size_t k = 0; k < z.f.size(); ++k) {
    if (integral_p && ip == 1) d.d_f[k] = 1.0;
    else if (integral_p && ip == 2) d.d_f[k] = 2.0 * z.f[k];
    else d.d_f[k] = p * std::pow(z.f[k], p - 1.0);
  }
  return d;
}

namespace {

void require(const std::vector<double>& g, std::size_t n, const char* what) {
  if (g.size() != n) throw std::invalid_argument(std::string(what) + ": missing or mis-shaped");
}

void validate_derivative(const FunctionalDerivative& d, const PhaseGrid& grid,
                         const char* who) {
  require(d.d_f, grid.phase_size(), who);
  require(d.d_E1, static_cast<std::size_t>(grid.Nx), who);
  if (grid.config == GridConfig::EM_1D2V) {
    require(d.d_E2, static_cast<std::size_t>(grid.Nx), who);
    require(d.d_B3, static_cast<std::size_t>(grid.Nx), who);
  }
  if (!d.d_A1.empty()) require(d.d_A1, static_cast<std::size_t>(grid.Nx), who);
  if (!d.d_A2.empty()) require(d.d_A2, static_cast<std::size_t>(grid.Nx), who);
}

}  // namespace

std::vector<double> canonical_xv_bracket(const std::vector<double>& a,
                                         const std::vector<double>& b,
                                         const PhaseGrid& grid, const Fourier& fx) {
  validate_phase_shape(a, grid, "a");
  validate_phase_shape(b, grid, "b");
  const auto dxa = fx.ddx_phase(a, grid);
  const auto dxb = fx.ddx_phase(b, grid);
  const auto dva = ddv1_phase(a, grid);
  const auto dvb = ddv1_phase(b, grid);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    out[k] = dxa[k] * dvb[k] - dva[k] * dxb[k];
  return out;
}

double mv_bracket(const FunctionalDerivative& Fd, const FunctionalDerivative& Gd,
                  const State& z, const PhaseGrid& grid, const Fourier& fx) {
  validate_state(z, grid);
  validate_derivative(Fd, grid, "mv_bracket: Fd");
  validate_derivative(Gd, grid, "mv_bracket: Gd");
  const double q = grid.q;
  const double dxw = grid.dx();

  const auto dxa = fx.ddx_phase(Fd.d_f, grid);
  const auto dxb = fx.ddx_phase(Gd.d_f, grid);
  const auto dv1a = ddv1_phase(Fd.d_f, grid);
  const auto dv1b = ddv1_phase(Gd.d_f, grid);

  double acc = 0.0;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double eF = Fd.d_E1[ix];
      const double eG = Gd.d_E1[ix];
      double row = 0.0;
      for (int j = 0; j < grid.Nv; ++j) {
        const std::size_t k = grid.idx(ix, j);
        const double vlasov = dxa[k] * dv1b[k] - dv1a[k] * dxb[k];
        const double coupling = q * (eG * dv1a[k] - eF * dv1b[k]);
        row += grid.vweight(j) * z.f[k] * (vlasov + coupling);
      }
      acc += row;
    }
  } else {
    const auto dv2a = ddv2_phase(Fd.d_f, grid);
    const auto dv2b = ddv2_phase(Gd.d_f, grid);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double b3 = z.B3[ix];
      const double e1F = Fd.d_E1[ix], e2F = Fd.d_E2[ix];
      const double e1G = Gd.d_E1[ix], e2G = Gd.d_E2[ix];
      double row = 0.0;
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double w1 = grid.vweight(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const std::size_t k = grid.idx(ix, j1, j2);
          const double vlasov = dxa[k] * dv1b[k] - dv1a[k] * dxb[k];
          const double twist = q * b3 * (dv1a[k] * dv2b[k] - dv2a[k] * dv1b[k]);
          const double coupling = q * (e1G * dv1a[k] + e2G * dv2a[k] -
                                       e1F * dv1b[k] - e2F * dv2b[k]);
          row += w1 * grid.vweight(j2) * z.f[k] * (vlasov + twist + coupling);
        }
      }
      acc += row;
    }
    // pure Maxwell terms
    const auto dxbB = fx.ddx_field(Gd.d_B3);
    const auto dxaB = fx.ddx_field(Fd.d_B3);
    double mx = 0.0;
    for (int ix = 0; ix < grid.Nx; ++ix)
      mx += Gd.d_E2[ix] * dxaB[ix] - Fd.d_E2[ix] * dxbB[ix];
    acc += mx;
  }

  // affine antenna slot: canonical (A, -E) pairing
  double ant = 0.0;
  if (!Gd.d_A1.empty() || !Fd.d_A1.empty()) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double gA = Gd.d_A1.empty() ? 0.0 : Gd.d_A1[ix];
      const double fA = Fd.d_A1.empty() ? 0.0 : Fd.d_A1[ix];
      ant += Gd.d_E1[ix] * fA - Fd.d_E1[ix] * gA;
    }
  }
  if (grid.config == GridConfig::EM_1D2V && (!Gd.d_A2.empty() || !Fd.d_A2.empty())) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double gA = Gd.d_A2.empty() ? 0.0 : Gd.d_A2[ix];
      const double fA = Fd.d_A2.empty() ? 0.0 : Fd.d_A2[ix];
      ant += Gd.d_E2[ix] * fA - Fd.d_E2[ix] * gA;
    }
  }
  return acc * dxw + ant * dxw;
}

StateTangent hamiltonian_vector_field(const FunctionalDerivative& Hd, const State& z,
                                      const PhaseGrid& grid, const Fourier& fx) {
  validate_state(z, grid);
  validate_derivative(Hd, grid, "hamiltonian_vector_field: Hd");
  const double q = grid.q;
  StateTangent t = StateTangent::zeros(grid);

  const auto dxh = fx.ddx_phase(Hd.d_f, grid);
  const auto dv1h = ddv1_phase(Hd.d_f, grid);

  const std::size_t n = grid.phase_size();
  std::vector<double> tmp(n);

  if (grid.config == GridConfig::ES_1D1V) {
    // df = -Dx(f dv h) - Dv'(f dx h) + q Dv'(f E_h)
    for (std::size_t k = 0; k < n; ++k) tmp[k] = z.f[k] * dv1h[k];
    const auto adv = fx.ddx_phase(tmp, grid);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = z.f[k] * dxh[k];
    const auto strm = ddv1_adjoint_phase(tmp, grid);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double e = Hd.d_E1[ix];
      for (int j = 0; j < grid.Nv; ++j) tmp[grid.idx(ix, j)] = z.f[grid.idx(ix, j)] * e;
    }
    const auto frc = ddv1_adjoint_phase(tmp, grid);
    for (std::size_t k = 0; k < n; ++k) t.df[k] = -adv[k] - strm[k] + q * frc[k];

    // dE1 = -q int f dv(h) dv
    for (int ix = 0; ix < grid.Nx; ++ix) {
      double acc = 0.0;
      for (int j = 0; j < grid.Nv; ++j) {
        const std::size_t k = grid.idx(ix, j);
        acc += grid.vweight(j) * z.f[k] * dv1h[k];
      }
      t.dE1[ix] = -q * acc;
    }
  } else {
    const auto dv2h = ddv2_phase(Hd.d_f, grid);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = z.f[k] * dv1h[k];
    const auto adv = fx.ddx_phase(tmp, grid);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = z.f[k] * dxh[k];
    const auto strm = ddv1_adjoint_phase(tmp, grid);

    // combined force fields per velocity direction:
    //   g1 = E1_h + B3 dv2 h,  g2 = E2_h - B3 dv1 h
    std::vector<double> tmp2(n);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double e1 = Hd.d_E1[ix], e2 = Hd.d_E2[ix], b3 = z.B3[ix];
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const std::size_t k = grid.idx(ix, j1, j2);
          tmp[k] = z.f[k] * (e1 + b3 * dv2h[k]);
          tmp2[k] = z.f[k] * (e2 - b3 * dv1h[k]);
        }
    }
    const auto frc1 = ddv1_adjoint_phase(tmp, grid);
    const auto frc2 = ddv2_adjoint_phase(tmp2, grid);
    for (std::size_t k = 0; k < n; ++k)
      t.df[k] = -adv[k] - strm[k] + q * (frc1[k] + frc2[k]);

    for (int ix = 0; ix < grid.Nx; ++ix) {
      double a1 = 0.0, a2 = 0.0;
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double w1 = grid.vweight(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const std::size_t k = grid.idx(ix, j1, j2);
          const double wf = w1 * grid.vweight(j2) * z.f[k];
          a1 += wf * dv1h[k];
          a2 += wf * dv2h[k];
        }
      }
      t.dE1[ix] = -q * a1;
      t.dE2[ix] = -q * a2;
    }
    // Maxwell part: dE2 += -dx(d_B3), dB3 = -dx(d_E2)
    const auto curlB = fx.ddx_field(Hd.d_B3);
    const auto curlE = fx.ddx_field(Hd.d_E2);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      t.dE2[ix] -= curlB[ix];
      t.dB3[ix] = -curlE[ix];
    }
  }

  if (!Hd.d_A1.empty())
    for (int ix = 0; ix < grid.Nx; ++ix) t.dE1[ix] -= Hd.d_A1[ix];
  if (grid.config == GridConfig::EM_1D2V && !Hd.d_A2.empty())
    for (int ix = 0; ix < grid.Nx; ++ix) t.dE2[ix] -= Hd.d_A2[ix];

  return t;
}

double pair_derivative_tangent(const FunctionalDerivative& Fd, const StateTangent& t,
                               const PhaseGrid& grid) {
  double acc = phase_inner(Fd.d_f, t.df, grid) + field_inner(Fd.d_E1, t.dE1, grid);
  if (grid.config == GridConfig::EM_1D2V)
    acc += field_inner(Fd.d_E2, t.dE2, grid) + field_inner(Fd.d_B3, t.dB3, grid);
  return acc;
}

}  // namespace mvtk
