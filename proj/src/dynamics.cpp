#include "mvtk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include <limits>
#include <stdexcept>

namespace mvtk {

namespace {

void add_external_current(StateTangent& t, const ExternalCurrent& j_ext,
                          const PhaseGrid& grid) {
  if (j_ext.empty()) return;
  if (static_cast<int>(j_ext.size()) != grid.vdim())
    throw std::invalid_argument("rhs: external current needs one component per velocity dimension");
  validate_field_shape(j_ext[0], grid, "j_ext[0]");
  for (int ix = 0; ix < grid.Nx; ++ix) t.dE1[ix] -= j_ext[0][ix];
  if (grid.vdim() == 2) {
    validate_field_shape(j_ext[1], grid, "j_ext[1]");
    for (int ix = 0; ix < grid.Nx; ++ix) t.dE2[ix] -= j_ext[1][ix];
  }
}

bool finite(const std::vector<double>& g) {
  for (double x : g)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

StateTangent rhs(const State& z, const PhaseGrid& grid, const Fourier& fx,
                 const ExternalCurrent* j_ext) {
  validate_state(z, grid);
  const double q = grid.q;
  StateTangent t = StateTangent::zeros(grid);

  const auto dxf = fx.ddx_phase(z.f, grid);
  const auto dv1f = ddv1_phase(z.f, grid);
  const auto j = current_density(z.f, grid);

  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double e = z.E1[ix];
      for (int jj = 0; jj < grid.Nv; ++jj) {
        const std::size_t k = grid.idx(ix, jj);
        t.df[k] = -grid.v(jj) * dxf[k] - q * e * dv1f[k];
      }
    }
    // Ampere form with the spatial mean removed (periodic solvability of the
    // zero-mean gauge)
    double jbar = 0.0;
    for (double x : j[0]) jbar += x;
    jbar /= grid.Nx;
    for (int ix = 0; ix < grid.Nx; ++ix) t.dE1[ix] = -q * (j[0][ix] - jbar);
  } else {
    const auto dv2f = ddv2_phase(z.f, grid);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double e1 = z.E1[ix], e2 = z.E2[ix], b3 = z.B3[ix];
      for (int j1 = 0; j1 < grid.Nv; ++j1) {
        const double v1 = grid.v(j1);
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double v2 = grid.v(j2);
          const std::size_t k = grid.idx(ix, j1, j2);
          t.df[k] = -v1 * dxf[k] - q * ((e1 + v2 * b3) * dv1f[k] +
                                        (e2 - v1 * b3) * dv2f[k]);
        }
      }
    }
    const auto dxB = fx.ddx_field(z.B3);
    const auto dxE2 = fx.ddx_field(z.E2);
    for (int ix = 0; ix < grid.Nx; ++ix) {
      t.dE1[ix] = -q * j[0][ix];
      t.dE2[ix] = -dxB[ix] - q * j[1][ix];
      t.dB3[ix] = -dxE2[ix];
    }
  }
  if (j_ext) add_external_current(t, *j_ext, grid);
  return t;
}

double cfl_bound(const State& z, const PhaseGrid& grid) {
  double emax = max_abs(z.E1);
  if (grid.config == GridConfig::EM_1D2V) emax = std::max(emax, max_abs(z.E2));
  const double adv = grid.dx() / grid.v_max;
  const double acc = emax > 0.0 ? grid.dv() / (std::abs(grid.q) * emax)
                                : std::numeric_limits<double>::infinity();
  return std::min(adv, acc);
}

State axpy(const State& z, double a, const StateTangent& t) {
  State out = z;
  for (std::size_t k = 0; k < out.f.size(); ++k) out.f[k] += a * t.df[k];
  for (std::size_t i = 0; i < out.E1.size(); ++i) out.E1[i] += a * t.dE1[i];
  for (std::size_t i = 0; i < out.E2.size(); ++i) out.E2[i] += a * t.dE2[i];
  for (std::size_t i = 0; i < out.B3.size(); ++i) out.B3[i] += a * t.dB3[i];
  return out;
}

StateTangent tangent_sub(const StateTangent& a, const StateTangent& b) {
  StateTangent out = a;
  for (std::size_t k = 0; k < out.df.size(); ++k) out.df[k] -= b.df[k];
  for (std::size_t i = 0; i < out.dE1.size(); ++i) out.dE1[i] -= b.dE1[i];
  for (std::size_t i = 0; i < out.dE2.size(); ++i) out.dE2[i] -= b.dE2[i];
  for (std::size_t i = 0; i < out.dB3.size(); ++i) out.dB3[i] -= b.dB3[i];
  return out;
}

StepResult step_rk4(const State& z, const PhaseGrid& grid, double t, double dt,
                    const RhsFn& f) {
  const StateTangent k1 = f(z, t);
  const StateTangent k2 = f(axpy(z, 0.5 * dt, k1), t + 0.5 * dt);
  const StateTangent k3 = f(axpy(z, 0.5 * dt, k2), t + 0.5 * dt);
  const StateTangent k4 = f(axpy(z, dt, k3), t + dt);

  StepResult r;
  r.z = z;
  const double c = dt / 6.0;
  for (std::size_t k = 0; k < z.f.size(); ++k)
    r.z.f[k] += c * (k1.df[k] + 2.0 * (k2.df[k] + k3.df[k]) + k4.df[k]);
  for (std::size_t i = 0; i < z.E1.size(); ++i)
    r.z.E1[i] += c * (k1.dE1[i] + 2.0 * (k2.dE1[i] + k3.dE1[i]) + k4.dE1[i]);
  for (std::size_t i = 0; i < z.E2.size(); ++i)
    r.z.E2[i] += c * (k1.dE2[i] + 2.0 * (k2.dE2[i] + k3.dE2[i]) + k4.dE2[i]);
  for (std::size_t i = 0; i < z.B3.size(); ++i)
    r.z.B3[i] += c * (k1.dB3[i] + 2.0 * (k2.dB3[i] + k3.dB3[i]) + k4.dB3[i]);

  if (!finite(r.z.f) || !finite(r.z.E1) || !finite(r.z.E2) || !finite(r.z.B3))
    throw std::runtime_error("step_rk4: NaN/Inf in state");
  r.cfl_warning = dt > cfl_bound(z, grid);
  return r;
}

StepResult step_rk4(const State& z, const PhaseGrid& grid, const Fourier& fx,
                    double t, double dt, const ExternalCurrent* j_ext) {
  return step_rk4(z, grid, t, dt,
                  [&](const State& s, double) { return rhs(s, grid, fx, j_ext); });
}

GaussReport gauss_residual(const State& z, const PhaseGrid& grid, const Fourier& fx) {
  validate_state(z, grid);
  GaussReport rep;
  auto rho = charge_density(z.f, grid);
  double mean = 0.0;
  for (double r : rho) mean += r;
  mean /= grid.Nx;
  const auto dxE = fx.ddx_field(z.E1);
  double m = 0.0;
  for (int ix = 0; ix < grid.Nx; ++ix)
    m = std::max(m, std::abs(dxE[ix] - grid.q * (rho[ix] - mean)));
  rep.e_residual = m;
  rep.divb_residual = 0.0;  // B3 has no x3 dependence in the reduced geometry
  return rep;
}

AnalyticVelocityProfile make_profile(const ScenarioParams& p) {
  switch (p.equilibrium) {
    case EquilibriumKind::two_stream:
      return AnalyticVelocityProfile::two_stream(p.u0, p.sigma);
    case EquilibriumKind::bump_on_tail:
      return AnalyticVelocityProfile::bump_on_tail(p.bump_density, p.u0, p.bump_sigma,
                                                   p.sigma);
    case EquilibriumKind::maxwellian:
    default:
      return AnalyticVelocityProfile::maxwellian(p.sigma);
  }
}

State homogeneous_state(const AnalyticVelocityProfile& F0, const PhaseGrid& grid) {
  State z = State::zeros(grid);
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j)
        z.f[grid.idx(ix, j)] = F0.value(grid.v(j));
  } else {
    // isotropic product profile in (v1, v2)
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2)
          z.f[grid.idx(ix, j1, j2)] = F0.value(grid.v(j1)) * F0.value(grid.v(j2));
  }
  return z;
}

State initial_state(const ScenarioParams& p, const PhaseGrid& grid, const Fourier& fx) {
  if (p.epsilon < 0.0) throw std::invalid_argument("initial_state: epsilon must be >= 0");
  const AnalyticVelocityProfile F0 = make_profile(p);
  State z = State::zeros(grid);
  const double k = 2.0 * M_PI * p.k_mode / grid.L;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double cx = std::cos(k * grid.x(ix));
      for (int j = 0; j < grid.Nv; ++j) {
        const double v = grid.v(j);
        double val;
        if (p.perturbation == PerturbationType::density)
          val = F0.value(v) * (1.0 + p.epsilon * cx);
        else
          val = F0.value(v - p.epsilon * cx);
        z.f[grid.idx(ix, j)] = val;
      }
    }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double cx = std::cos(k * grid.x(ix));
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double v1 = grid.v(j1);
          double g1;
          if (p.perturbation == PerturbationType::density)
            g1 = F0.value(v1) * (1.0 + p.epsilon * cx);
          else
            g1 = F0.value(v1 - p.epsilon * cx);
          z.f[grid.idx(ix, j1, j2)] = g1 * F0.value(grid.v(j2));
        }
    }
  }
  // initial E from the spectral Poisson solve of the neutralized density
  auto rho = charge_density(z.f, grid);
  double mean = 0.0;
  for (double r : rho) mean += r;
  mean /= grid.Nx;
  std::vector<double> src(grid.Nx);
  for (int ix = 0; ix < grid.Nx; ++ix) src[ix] = grid.q * (rho[ix] - mean);
  z.E1 = fx.solve_efield(src);
  return z;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void record(DiagnosticSeries& s, double t, const State& z, const PhaseGrid& grid,
            const Fourier& fx) {
  s.t.push_back(t);
  s.energy.push_back(total_energy(z, grid));
  s.casimir1.push_back(casimir_lp(z.f, grid, 1.0));
  s.casimir2.push_back(casimir_lp(z.f, grid, 2.0));
  s.gauss.push_back(gauss_residual(z, grid, fx).e_residual);
  s.mode_energy.push_back(fx.mode_energies(z.E1, 4));
  s.fmin.push_back(min_f(z.f));
}

}  // namespace

std::string DiagnosticSeries::to_csv() const {
  std::string out = "t,energy,casimir1,casimir2,gauss_residual,"
                    "mode_energy_1,mode_energy_2,mode_energy_3,mode_energy_4,min_f\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += fmt17(t[i]) + "," + fmt17(energy[i]) + "," + fmt17(casimir1[i]) + "," +
           fmt17(casimir2[i]) + "," + fmt17(gauss[i]);
    for (int m = 0; m < 4; ++m) out += "," + fmt17(mode_energy[i][m]);
    out += "," + fmt17(fmin[i]) + "\n";
  }
  return out;
}

std::string DiagnosticSeries::to_json() const {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["energy"] = energy;
  j["casimir1"] = casimir1;
  j["casimir2"] = casimir2;
  j["gauss_residual"] = gauss;
  for (int m = 0; m < 4; ++m) {
    std::vector<double> col(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) col[i] = mode_energy[i][m];
    j["mode_energy_" + std::to_string(m + 1)] = col;
  }
  j["min_f"] = fmin;
  j["dt_effective"] = dt_effective;
  j["cfl_warning"] = cfl_warning;
  if (!error.empty()) j["error"] = error;
  return j.dump(2);
}

void DiagnosticSeries::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_csv();
}

RunResult run_from(const State& z0, const ScenarioParams& p, const PhaseGrid& grid,
                   const Fourier& fx, const RhsFn* extra) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (!(p.t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");

  RunResult res;
  res.final_state = z0;

  const double bound = cfl_bound(z0, grid);
  double dt = p.dt;
  if (dt > 0.8 * bound) {
    res.series.cfl_warning = true;
    dt = 0.8 * bound;
  }
  const int nsteps = std::max(1, static_cast<int>(std::ceil(p.t_end / dt - 1e-12)));
  dt = p.t_end / nsteps;
  res.series.dt_effective = dt;

  RhsFn f = [&](const State& s, double t) {
    StateTangent k = rhs(s, grid, fx, nullptr);
    if (extra && *extra) {
      const StateTangent e = (*extra)(s, t);
      for (std::size_t i = 0; i < k.df.size(); ++i) k.df[i] += e.df[i];
      for (std::size_t i = 0; i < k.dE1.size(); ++i) k.dE1[i] += e.dE1[i];
      for (std::size_t i = 0; i < k.dE2.size(); ++i) k.dE2[i] += e.dE2[i];
      for (std::size_t i = 0; i < k.dB3.size(); ++i) k.dB3[i] += e.dB3[i];
    }
    return k;
  };

  record(res.series, 0.0, res.final_state, grid, fx);
  for (int n = 0; n < nsteps; ++n) {
    const double t = n * dt;
    try {
      StepResult sr = step_rk4(res.final_state, grid, t, dt, f);
      res.series.cfl_warning = res.series.cfl_warning || sr.cfl_warning;
      res.final_state = std::move(sr.z);
    } catch (const std::exception& e) {
      res.series.error = std::string(e.what()) + " at step " + std::to_string(n + 1);
      return res;
    }
    if ((n + 1) % p.cadence == 0 || n + 1 == nsteps)
      record(res.series, (n + 1) * dt, res.final_state, grid, fx);
  }
  return res;
}

RunResult run(const ScenarioParams& p, const PhaseGrid& grid, const Fourier& fx,
              const RhsFn* extra) {
  return run_from(initial_state(p, grid, fx), p, grid, fx, extra);
}

}  // namespace mvtk
