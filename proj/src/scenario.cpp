#include "mvtk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "mvtk/control.hpp"
#include "mvtk/energy_casimir.hpp"
#include "mvtk/equilibrium.hpp"
#include "mvtk/fitting.hpp"
#include "mvtk/gnh.hpp"
#include "mvtk/gnh_elimination.hpp"
#include "mvtk/linear_stability.hpp"
#include "mvtk/toml.hpp"

namespace mvtk::scenario {

using nlohmann::ordered_json;

std::string to_string(Name n) {
  switch (n) {
    case Name::landau: return "landau";
    case Name::two_stream: return "two_stream";
    case Name::bracket_check: return "bracket_check";
    case Name::gnh_demo: return "gnh_demo";
    case Name::ec_stability: return "ec_stability";
    case Name::controlled_stabilization: return "controlled_stabilization";
    case Name::convergence: return "convergence";
  }
  return "?";
}

std::optional<Name> name_from_string(const std::string& s) {
  for (Name n : {Name::landau, Name::two_stream, Name::bracket_check, Name::gnh_demo,
                 Name::ec_stability, Name::controlled_stabilization, Name::convergence})
    if (to_string(n) == s) return n;
  return std::nullopt;
}

namespace {

std::string anchor_for(Name n) {
  switch (n) {
    case Name::landau:
      return "nonlinear electrostatic evolution; Landau damping vs dielectric root";
    case Name::two_stream:
      return "nonlinear electrostatic evolution; two-stream instability growth";
    case Name::bracket_check:
      return "Maxwell-Vlasov Lie-Poisson bracket algebra";
    case Name::gnh_demo:
      return "Gotay-Nester-Hinds presymplectic constraint chains";
    case Name::ec_stability:
      return "energy-Casimir first/second variation and formal stability";
    case Name::controlled_stabilization:
      return "affine Hamiltonian antenna controls; controlled stabilization";
    case Name::convergence:
      return "discretization consistency of the bracket and the evolution";
  }
  return "";
}

Check make_check(const std::string& name, double value, double threshold, bool pass,
                 const std::string& note = "") {
  return Check{name, pass, value, threshold, note};
}

Check leq(const std::string& name, double value, double threshold,
          const std::string& note = "") {
  return make_check(name, value, threshold, value <= threshold, note);
}

Check geq(const std::string& name, double value, double threshold,
          const std::string& note = "") {
  return make_check(name, value, threshold, value >= threshold, note);
}

void finalize(Report& rep, const RunConfig& cfg) {
  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  ordered_json jc = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    if (!c.note.empty()) e["note"] = c.note;
    jc.push_back(e);
  }
  ordered_json root;
  root["scenario"] = to_string(rep.scenario);
  root["anchor"] = anchor_for(rep.scenario);
  root["seed"] = cfg.seed;
  root["pass"] = rep.pass;
  root["checks"] = jc;
  root["detail"] = rep.json.is_null() ? ordered_json::object() : rep.json;
  rep.json = root;
}

// deterministic smooth random fields -----------------------------------------

struct FieldGen {
  std::mt19937_64 rng;
  explicit FieldGen(std::uint64_t seed) : rng(seed) {}

  double uni() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }

  std::vector<double> spatial(const PhaseGrid& grid, int mmax = 3) {
    std::vector<double> g(grid.Nx, 0.0);
    for (int m = 0; m <= mmax; ++m) {
      const double a = uni(), b = uni();
      for (int ix = 0; ix < grid.Nx; ++ix) {
        const double th = 2.0 * M_PI * m * grid.x(ix) / grid.L;
        g[ix] += a * std::cos(th) + (m ? b * std::sin(th) : 0.0);
      }
    }
    return g;
  }

  // smooth phase function with a Gaussian velocity envelope
  std::vector<double> phase(const PhaseGrid& grid, double envelope_frac = 0.45) {
    std::vector<double> g(grid.phase_size(), 0.0);
    const double s = envelope_frac * grid.v_max;
    for (int m = 0; m <= 2; ++m) {
      const double a = uni(), b = uni(), c0 = uni(), c1 = uni(), c2 = uni();
      const double d0 = uni(), d1 = uni();
      for (int ix = 0; ix < grid.Nx; ++ix) {
        const double th = 2.0 * M_PI * m * grid.x(ix) / grid.L;
        const double sp = a * std::cos(th) + (m ? b * std::sin(th) : 0.0);
        if (grid.config == GridConfig::ES_1D1V) {
          for (int j = 0; j < grid.Nv; ++j) {
            const double v = grid.v(j);
            const double env = std::exp(-0.5 * v * v / (s * s));
            g[grid.idx(ix, j)] += sp * env * (c0 + c1 * v + c2 * v * v);
          }
        } else {
          for (int j1 = 0; j1 < grid.Nv; ++j1)
            for (int j2 = 0; j2 < grid.Nv; ++j2) {
              const double v1 = grid.v(j1), v2 = grid.v(j2);
              const double env = std::exp(-0.5 * (v1 * v1 + v2 * v2) / (s * s));
              g[grid.idx(ix, j1, j2)] +=
                  sp * env * (c0 + c1 * v1 + c2 * v1 * v1 + d0 * v2 + d1 * v1 * v2);
            }
        }
      }
    }
    return g;
  }

  FunctionalDerivative derivative(const PhaseGrid& grid) {
    FunctionalDerivative d = FunctionalDerivative::zeros(grid);
    d.d_f = phase(grid);
    d.d_E1 = spatial(grid);
    if (grid.config == GridConfig::EM_1D2V) {
      d.d_E2 = spatial(grid);
      d.d_B3 = spatial(grid);
    }
    return d;
  }

  State state(const PhaseGrid& grid) {
    State z = homogeneous_state(AnalyticVelocityProfile::maxwellian(grid.v_max / 6.0),
                                grid);
    const auto pert = phase(grid);
    for (std::size_t k = 0; k < z.f.size(); ++k) z.f[k] += 0.05 * pert[k];
    z.E1 = spatial(grid);
    for (auto& x : z.E1) x *= 0.3;
    if (grid.config == GridConfig::EM_1D2V) {
      z.E2 = spatial(grid);
      z.B3 = spatial(grid);
      for (auto& x : z.E2) x *= 0.3;
      for (auto& x : z.B3) x *= 0.3;
    }
    return z;
  }
};

// analytic smooth fields for refinement studies (identical across grids)
std::vector<double> analytic_phase(const PhaseGrid& grid, int which) {
  std::vector<double> g(grid.phase_size());
  const double k1 = 2.0 * M_PI / grid.L;
  for (int ix = 0; ix < grid.Nx; ++ix) {
    const double x = grid.x(ix);
    for (int j = 0; j < grid.Nv; ++j) {
      const double v = grid.v(j);
      const double env = std::exp(-v * v / 8.0);
      double val = 0.0;
      switch (which) {
        case 0: val = std::cos(k1 * x) * v * env; break;
        case 1: val = std::sin(k1 * x) * (1.0 + 0.5 * v) * env; break;
        default: val = std::cos(2.0 * k1 * x) * (v * v - 1.0) * env; break;
      }
      g[grid.idx(ix, j)] = val;
    }
  }
  return g;
}

std::vector<double> analytic_field(const PhaseGrid& grid, int which) {
  std::vector<double> g(grid.Nx);
  const double k1 = 2.0 * M_PI / grid.L;
  for (int ix = 0; ix < grid.Nx; ++ix) {
    const double x = grid.x(ix);
    g[ix] = which == 0 ? std::sin(k1 * x) : 0.5 * std::cos(k1 * x) + 0.3 * std::sin(2 * k1 * x);
  }
  return g;
}

State analytic_state(const PhaseGrid& grid) {
  State z = State::zeros(grid);
  const double k1 = 2.0 * M_PI / grid.L;
  constexpr double inv_sqrt2pi = 0.39894228040143267794;
  for (int ix = 0; ix < grid.Nx; ++ix) {
    const double x = grid.x(ix);
    const double mod = 1.0 + 0.4 * std::cos(k1 * x);
    for (int j = 0; j < grid.Nv; ++j) {
      const double v = grid.v(j);
      z.f[grid.idx(ix, j)] =
          mod * inv_sqrt2pi * std::exp(-0.5 * v * v) * (1.0 + 0.2 * std::sin(k1 * x) * v);
    }
  }
  z.E1 = analytic_field(grid, 0);
  return z;
}

// derivative of the observable z -> mv_bracket(Fd, Gd, z) for linear F, G
// (ES configuration; used by the Jacobi refinement study)
FunctionalDerivative bracket_observable_derivative(const FunctionalDerivative& Fd,
                                                   const FunctionalDerivative& Gd,
                                                   const PhaseGrid& grid,
                                                   const Fourier& fx) {
  FunctionalDerivative d = FunctionalDerivative::zeros(grid);
  const auto ab = canonical_xv_bracket(Fd.d_f, Gd.d_f, grid, fx);
  const auto dva = ddv1_phase(Fd.d_f, grid);
  const auto dvb = ddv1_phase(Gd.d_f, grid);
  for (int ix = 0; ix < grid.Nx; ++ix)
    for (int j = 0; j < grid.Nv; ++j) {
      const std::size_t k = grid.idx(ix, j);
      d.d_f[k] = ab[k] + grid.q * (Gd.d_E1[ix] * dva[k] - Fd.d_E1[ix] * dvb[k]);
    }
  return d;
}

}  // namespace

// config ----------------------------------------------------------------------

ConfigError::ConfigError(const std::vector<std::string>& v)
    : std::runtime_error([&] {
        std::string m = "invalid configuration:";
        for (const auto& s : v) m += "\n  - " + s;
        return m;
      }()),
      violations(v) {}

RunConfig default_config(Name scenario) {
  RunConfig cfg;
  cfg.scenario = scenario;
  switch (scenario) {
    case Name::landau:
      cfg.grid = PhaseGrid::es_1d1v(4.0 * M_PI, 64, 6.0, 256);
      cfg.params = ScenarioParams{};
      break;
    case Name::two_stream:
      cfg.grid = PhaseGrid::es_1d1v(10.0 * M_PI, 64, 8.4, 256);
      cfg.params = ScenarioParams{};
      cfg.params.equilibrium = EquilibriumKind::two_stream;
      cfg.params.t_end = 30.0;
      cfg.params.u0 = 2.4;
      break;
    default:
      cfg.grid = PhaseGrid::es_1d1v(4.0 * M_PI, 32, 6.0, 96);
      cfg.params = ScenarioParams{};
      break;
  }
  return cfg;
}

namespace {

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {
      "scenario", "seed", "out_dir", "resolution",
      "grid.config", "grid.Nx", "grid.Nv", "grid.L", "grid.v_max", "grid.q",
      "grid.neutralize",
      "run.dt", "run.t_end", "run.k_mode", "run.epsilon", "run.perturbation",
      "run.equilibrium", "run.sigma", "run.u0", "run.bump_density",
      "run.bump_sigma", "run.cadence",
      "control.kind", "control.mode", "control.amplitude", "control.frequency",
      "control.v_center", "control.v_width"};
  return keys;
}

}  // namespace

RunConfig parse_config(const std::string& text, std::optional<Name> cli_scenario) {
  std::vector<std::string> bad;
  toml::Table tab;
  try {
    tab = toml::parse(text);
  } catch (const toml::ParseError& e) {
    throw ConfigError({e.what()});
  }

  for (const auto& [k, v] : tab)
    if (!allowed_keys().count(k)) bad.push_back("unknown key \"" + k + "\"");

  std::optional<Name> file_scenario;
  if (auto it = tab.find("scenario"); it != tab.end()) {
    if (!it->second.is_string()) {
      bad.push_back("scenario: expected a string");
    } else {
      file_scenario = name_from_string(it->second.as_string());
      if (!file_scenario)
        bad.push_back("scenario: unknown scenario \"" + it->second.as_string() + "\"");
    }
  }
  if (cli_scenario && file_scenario && *cli_scenario != *file_scenario)
    bad.push_back("scenario: config says \"" + to_string(*file_scenario) +
                  "\" but the subcommand is \"" + to_string(*cli_scenario) + "\"");
  const Name scen = cli_scenario ? *cli_scenario
                                 : (file_scenario ? *file_scenario : Name::landau);
  RunConfig cfg = default_config(scen);

  auto num = [&](const char* key, double lo, bool strict, double* dst) {
    auto it = tab.find(key);
    if (it == tab.end()) return;
    if (!it->second.is_int() && !it->second.is_float()) {
      bad.push_back(std::string(key) + ": expected a number");
      return;
    }
    const double v = it->second.as_number();
    const bool ok = strict ? v > lo : v >= lo;
    if (!ok) {
      bad.push_back(std::string(key) + ": must be " + (strict ? "> " : ">= ") +
                    std::to_string(lo));
      return;
    }
    *dst = v;
  };
  auto integer = [&](const char* key, long long lo, int* dst) {
    auto it = tab.find(key);
    if (it == tab.end()) return;
    if (!it->second.is_int()) {
      bad.push_back(std::string(key) + ": expected an integer");
      return;
    }
    const long long v = it->second.as_int();
    if (v < lo) {
      bad.push_back(std::string(key) + ": must be >= " + std::to_string(lo));
      return;
    }
    *dst = static_cast<int>(v);
  };

  if (auto it = tab.find("seed"); it != tab.end()) {
    if (it->second.is_int() && it->second.as_int() >= 0)
      cfg.seed = static_cast<std::uint64_t>(it->second.as_int());
    else
      bad.push_back("seed: expected a nonnegative integer");
  }
  if (auto it = tab.find("out_dir"); it != tab.end()) {
    if (it->second.is_string()) cfg.out_dir = it->second.as_string();
    else bad.push_back("out_dir: expected a string");
  }
  if (auto it = tab.find("resolution"); it != tab.end()) {
    if (it->second.is_string()) cfg.resolution = it->second.as_string();
    else bad.push_back("resolution: expected a string");
  }
  if (cfg.resolution != "low" && cfg.resolution != "ref" && cfg.resolution != "high")
    bad.push_back("resolution: must be one of low, ref, high");
  else if (cfg.resolution == "low") {
    cfg.grid.Nx = 32;
    cfg.grid.Nv = 64;
  } else if (cfg.resolution == "high") {
    cfg.grid.Nx = 128;
    cfg.grid.Nv = 512;
  }

  if (auto it = tab.find("grid.config"); it != tab.end()) {
    if (!it->second.is_string())
      bad.push_back("grid.config: expected a string");
    else if (it->second.as_string() == "es_1d1v")
      cfg.grid.config = GridConfig::ES_1D1V;
    else if (it->second.as_string() == "em_1d2v")
      cfg.grid.config = GridConfig::EM_1D2V;
    else
      bad.push_back("grid.config: must be es_1d1v or em_1d2v");
  }
  integer("grid.Nx", 4, &cfg.grid.Nx);
  integer("grid.Nv", 4, &cfg.grid.Nv);
  num("grid.L", 0.0, true, &cfg.grid.L);
  num("grid.v_max", 0.0, true, &cfg.grid.v_max);
  if (auto it = tab.find("grid.q"); it != tab.end()) {
    if (it->second.is_int() || it->second.is_float()) cfg.grid.q = it->second.as_number();
    else bad.push_back("grid.q: expected a number");
  }
  if (auto it = tab.find("grid.neutralize"); it != tab.end()) {
    if (it->second.is_bool()) cfg.grid.background_neutralizing = it->second.as_bool();
    else bad.push_back("grid.neutralize: expected a boolean");
  }
  if (cfg.grid.Nx % 2 != 0) bad.push_back("grid.Nx: must be even");

  num("run.dt", 0.0, true, &cfg.params.dt);
  num("run.t_end", 0.0, true, &cfg.params.t_end);
  integer("run.k_mode", 1, &cfg.params.k_mode);
  num("run.epsilon", 0.0, false, &cfg.params.epsilon);
  num("run.sigma", 0.0, true, &cfg.params.sigma);
  num("run.u0", 0.0, false, &cfg.params.u0);
  num("run.bump_density", 0.0, false, &cfg.params.bump_density);
  num("run.bump_sigma", 0.0, true, &cfg.params.bump_sigma);
  integer("run.cadence", 1, &cfg.params.cadence);
  if (auto it = tab.find("run.perturbation"); it != tab.end()) {
    const std::string s = it->second.is_string() ? it->second.as_string() : "";
    if (s == "density") cfg.params.perturbation = PerturbationType::density;
    else if (s == "velocity") cfg.params.perturbation = PerturbationType::velocity;
    else bad.push_back("run.perturbation: must be density or velocity");
  }
  if (auto it = tab.find("run.equilibrium"); it != tab.end()) {
    const std::string s = it->second.is_string() ? it->second.as_string() : "";
    if (s == "maxwellian") cfg.params.equilibrium = EquilibriumKind::maxwellian;
    else if (s == "two_stream") cfg.params.equilibrium = EquilibriumKind::two_stream;
    else if (s == "bump_on_tail") cfg.params.equilibrium = EquilibriumKind::bump_on_tail;
    else bad.push_back("run.equilibrium: must be maxwellian, two_stream or bump_on_tail");
  }

  if (auto it = tab.find("control.kind"); it != tab.end()) {
    const std::string k = it->second.is_string() ? it->second.as_string() : "";
    if (k == "current_coupling" || k == "casimir_shaping") cfg.control.kind = k;
    else bad.push_back("control.kind: must be current_coupling or casimir_shaping");
  }
  integer("control.mode", 1, &cfg.control.mode);
  if (auto it = tab.find("control.amplitude"); it != tab.end()) {
    if (it->second.is_int() || it->second.is_float())
      cfg.control.amplitude = it->second.as_number();
    else
      bad.push_back("control.amplitude: expected a number");
  }
  num("control.frequency", 0.0, false, &cfg.control.frequency);
  if (auto it = tab.find("control.v_center"); it != tab.end()) {
    if (it->second.is_int() || it->second.is_float())
      cfg.control.v_center = it->second.as_number();
    else
      bad.push_back("control.v_center: expected a number");
  }
  num("control.v_width", 0.0, true, &cfg.control.v_width);
  cfg.control.active = cfg.control.amplitude != 0.0;

  if (!bad.empty()) throw ConfigError(bad);
  return cfg;
}

nlohmann::ordered_json effective_config_json(const RunConfig& cfg) {
  ordered_json j;
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["resolution"] = cfg.resolution;
  j["grid"]["config"] = mvtk::to_string(cfg.grid.config);
  j["grid"]["Nx"] = cfg.grid.Nx;
  j["grid"]["Nv"] = cfg.grid.Nv;
  j["grid"]["L"] = cfg.grid.L;
  j["grid"]["v_max"] = cfg.grid.v_max;
  j["grid"]["q"] = cfg.grid.q;
  j["grid"]["neutralize"] = cfg.grid.background_neutralizing;
  j["run"]["dt"] = cfg.params.dt;
  j["run"]["t_end"] = cfg.params.t_end;
  j["run"]["k_mode"] = cfg.params.k_mode;
  j["run"]["epsilon"] = cfg.params.epsilon;
  j["run"]["perturbation"] =
      cfg.params.perturbation == PerturbationType::density ? "density" : "velocity";
  j["run"]["equilibrium"] = cfg.params.equilibrium == EquilibriumKind::maxwellian
                                ? "maxwellian"
                                : (cfg.params.equilibrium == EquilibriumKind::two_stream
                                       ? "two_stream"
                                       : "bump_on_tail");
  j["run"]["sigma"] = cfg.params.sigma;
  j["run"]["u0"] = cfg.params.u0;
  j["run"]["bump_density"] = cfg.params.bump_density;
  j["run"]["bump_sigma"] = cfg.params.bump_sigma;
  j["run"]["cadence"] = cfg.params.cadence;
  if (cfg.control.active) {
    j["control"]["kind"] = cfg.control.kind;
    j["control"]["mode"] = cfg.control.mode;
    j["control"]["amplitude"] = cfg.control.amplitude;
    j["control"]["frequency"] = cfg.control.frequency;
    j["control"]["v_center"] = cfg.control.v_center;
    j["control"]["v_width"] = cfg.control.v_width;
  }
  return j;
}

// scenarios -------------------------------------------------------------------

namespace {

struct ConfiguredControl {
  std::vector<ControlChannel> channels;
  ControlSchedule schedule;
};

ConfiguredControl build_control(const ControlSpec& spec, const PhaseGrid& grid) {
  ConfiguredControl out;
  if (!spec.active) return out;
  if (spec.kind == "current_coupling") {
    std::vector<double> j(grid.Nx);
    for (int ix = 0; ix < grid.Nx; ++ix)
      j[ix] = std::cos(2.0 * M_PI * spec.mode * grid.x(ix) / grid.L);
    out.channels.push_back(ControlChannel::current(std::move(j)));
  } else {
    std::vector<double> w(grid.phase_size());
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int jv = 0; jv < grid.Nv; ++jv) {
        const double a = (grid.v(jv) - spec.v_center) / spec.v_width;
        w[grid.idx(ix, jv)] = std::exp(-0.5 * a * a);
      }
    out.channels.push_back(ControlChannel::shaping(std::move(w)));
  }
  ControlSignal u;
  if (spec.frequency != 0.0) {
    u.kind = ControlSignal::Kind::sinusoid;
    u.frequency = spec.frequency;
  }
  u.amplitude = spec.amplitude;
  out.schedule.u.push_back(u);
  return out;
}

RunResult run_with_optional_control(const RunConfig& cfg, const PhaseGrid& grid,
                                    const Fourier& fx, const ConfiguredControl& ctl) {
  if (ctl.channels.empty()) return run(cfg.params, grid, fx);
  const RhsFn forcing = make_control_forcing(ctl.channels, ctl.schedule, grid, fx);
  return run(cfg.params, grid, fx, &forcing);
}

std::string spectrum_artifact(const RunConfig& cfg, const PhaseGrid& grid,
                              const Fourier& fx) {
  const Equilibrium eq = make_homogeneous_equilibrium(
      make_profile(cfg.params),
      cfg.params.equilibrium == EquilibriumKind::two_stream
          ? Equilibrium::Kind::two_stream
          : Equilibrium::Kind::maxwellian,
      grid, fx);
  const LinearOperator op = build_linear_operator(eq, cfg.params.k_mode, grid);
  return spectrum_to_csv(op, spectrum(op));
}

}  // namespace

Report landau(const RunConfig& cfg, DiagnosticSeries* series_out) {
  Report rep;
  rep.scenario = Name::landau;
  Fourier fx(cfg.grid.Nx, cfg.grid.L);

  const ConfiguredControl ctl = build_control(cfg.control, cfg.grid);
  const RunResult rr = run_with_optional_control(cfg, cfg.grid, fx, ctl);
  if (series_out) *series_out = rr.series;
  const DiagnosticSeries& s = rr.series;
  if (!s.error.empty()) {
    rep.checks.push_back(make_check("run_completed", 0, 1, false, s.error));
    finalize(rep, cfg);
    return rep;
  }

  std::vector<double> mode1(s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) mode1[i] = s.mode_energy[i][0];
  const DecayFit fit =
      fit_decay_rate(s.t, mode1, 1.0, 0.95 * cfg.params.t_end);

  const AnalyticVelocityProfile F0 = make_profile(cfg.params);
  const double k = 2.0 * M_PI * cfg.params.k_mode / cfg.grid.L;
  const std::complex<double> omega = dispersion_root_oracle(F0, k);
  const double expected_rate = 2.0 * omega.imag();  // field energy ~ |E|^2

  if (!cfg.control.active) {
    rep.checks.push_back(make_check("decay_fit_ok", fit.ok ? 1 : 0, 1, fit.ok));
    const double rate_err =
        std::abs(fit.rate - expected_rate) / std::abs(expected_rate);
    rep.checks.push_back(leq("decay_rate_vs_oracle_rel_err", rate_err, 0.05));
  }
  double gmax = 0.0;
  for (double g : s.gauss) gmax = std::max(gmax, g);
  if (!cfg.control.active) {
    // the Gauss leaf is preserved only by the free flow; antenna currents
    // with divergence deposit external charge and move the state across
    // constraint leaves (reported, not gated, under control)
    rep.checks.push_back(leq("gauss_residual_max", gmax, 1e-6));
    // conserved only along the free flow: an antenna injects energy
    double edrift = 0.0;
    for (double e : s.energy) edrift = std::max(edrift, std::abs(e - s.energy.front()));
    rep.checks.push_back(leq("energy_drift_rel", edrift / std::abs(s.energy.front()), 1e-5));
    double c1d = 0.0, c2d = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      c1d = std::max(c1d, std::abs(s.casimir1[i] - s.casimir1.front()));
      c2d = std::max(c2d, std::abs(s.casimir2[i] - s.casimir2.front()));
    }
    rep.checks.push_back(leq("casimir1_drift_rel", c1d / std::abs(s.casimir1.front()), 1e-5));
    rep.checks.push_back(leq("casimir2_drift_rel", c2d / std::abs(s.casimir2.front()), 1e-5));
  }
  double fmin = 0.0, fmax0 = 0.0;
  for (double v : s.fmin) fmin = std::min(fmin, v);
  fmax0 = *std::max_element(rr.final_state.f.begin(), rr.final_state.f.end());
  rep.checks.push_back(geq("min_f_over_max_f", fmin / fmax0, -1e-6));

  rep.json["oracle_omega"] = {omega.real(), omega.imag()};
  rep.json["expected_energy_rate"] = expected_rate;
  rep.json["fitted_energy_rate"] = fit.rate;
  rep.json["fitted_frequency"] = fit.frequency;
  rep.json["oracle_frequency_half_period"] = omega.real();
  rep.json["peaks_used"] = fit.peaks_used;
  rep.json["dt_effective"] = s.dt_effective;
  rep.json["cfl_warning"] = s.cfl_warning;
  rep.json["control_active"] = cfg.control.active;
  rep.json["gauss_residual_max"] = gmax;
  rep.artifacts.emplace_back("spectrum.csv", spectrum_artifact(cfg, cfg.grid, fx));
  rep.artifacts.emplace_back("diagnostics.json", s.to_json());
  finalize(rep, cfg);
  return rep;
}

Report two_stream(const RunConfig& cfg, DiagnosticSeries* series_out) {
  Report rep;
  rep.scenario = Name::two_stream;
  Fourier fx(cfg.grid.Nx, cfg.grid.L);

  const ConfiguredControl ctl = build_control(cfg.control, cfg.grid);
  const RunResult rr = run_with_optional_control(cfg, cfg.grid, fx, ctl);
  if (series_out) *series_out = rr.series;
  const DiagnosticSeries& s = rr.series;
  if (!s.error.empty()) {
    rep.checks.push_back(make_check("run_completed", 0, 1, false, s.error));
    finalize(rep, cfg);
    return rep;
  }

  std::vector<double> mode1(s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) mode1[i] = s.mode_energy[i][0];
  const GrowthFit fit = fit_growth_rate(s.t, mode1);

  const AnalyticVelocityProfile F0 = make_profile(cfg.params);
  const double k = 2.0 * M_PI * cfg.params.k_mode / cfg.grid.L;
  const std::complex<double> omega = dispersion_root_oracle(F0, k);
  const double expected_rate = 2.0 * omega.imag();

  if (!cfg.control.active) {
    rep.checks.push_back(make_check("growth_fit_ok", fit.ok ? 1 : 0, 1, fit.ok));
    rep.checks.push_back(make_check("oracle_root_unstable", omega.imag(), 0.0,
                                    omega.imag() > 0.0));
  }
  const double rate_err = std::abs(fit.rate - expected_rate) / std::abs(expected_rate);
  if (!cfg.control.active) {
    rep.checks.push_back(leq("growth_rate_vs_oracle_rel_err", rate_err, 0.05));
    double gmax = 0.0;
    for (double g : s.gauss) gmax = std::max(gmax, g);
    rep.checks.push_back(leq("gauss_residual_max", gmax, 1e-6));
  }

  rep.json["oracle_omega"] = {omega.real(), omega.imag()};
  rep.json["expected_energy_rate"] = expected_rate;
  rep.json["fitted_energy_rate"] = fit.rate;
  rep.json["fit_window"] = {fit.window_t0, fit.window_t1};
  rep.json["dt_effective"] = s.dt_effective;
  rep.json["energy_drift_rel"] =
      std::abs(s.energy.back() - s.energy.front()) / std::abs(s.energy.front());
  rep.artifacts.emplace_back("spectrum.csv", spectrum_artifact(cfg, cfg.grid, fx));
  rep.artifacts.emplace_back("diagnostics.json", s.to_json());
  finalize(rep, cfg);
  return rep;
}

Report bracket_check(const RunConfig& cfg) {
  Report rep;
  rep.scenario = Name::bracket_check;
  FieldGen gen(cfg.seed);

  const PhaseGrid ges = PhaseGrid::es_1d1v(4.0 * M_PI, 32, 6.0, 48);
  const PhaseGrid gem = PhaseGrid::em_1d2v(2.0 * M_PI, 12, 5.0, 12);
  Fourier fes(ges.Nx, ges.L), fem(gem.Nx, gem.L);

  double antisym = 0.0, bilin = 0.0, duality = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool em = trial % 5 == 3;  // 20 EM draws out of 100
    const PhaseGrid& grid = em ? gem : ges;
    const Fourier& fx = em ? fem : fes;
    const State z = gen.state(grid);
    const FunctionalDerivative Fd = gen.derivative(grid);
    const FunctionalDerivative Gd = gen.derivative(grid);
    const double bfg = mv_bracket(Fd, Gd, z, grid, fx);
    const double bgf = mv_bracket(Gd, Fd, z, grid, fx);
    const double scale = std::max(1.0, std::abs(bfg));
    antisym = std::max(antisym, std::abs(bfg + bgf) / scale);

    {
      const FunctionalDerivative Hd = gen.derivative(grid);
      const double a = 0.5 + 0.5 * std::abs(gen.uni()), b = gen.uni();
      FunctionalDerivative lin = FunctionalDerivative::zeros(grid);
      for (std::size_t i = 0; i < lin.d_f.size(); ++i)
        lin.d_f[i] = a * Fd.d_f[i] + b * Hd.d_f[i];
      for (int ix = 0; ix < grid.Nx; ++ix) {
        lin.d_E1[ix] = a * Fd.d_E1[ix] + b * Hd.d_E1[ix];
        if (em) {
          lin.d_E2[ix] = a * Fd.d_E2[ix] + b * Hd.d_E2[ix];
          lin.d_B3[ix] = a * Fd.d_B3[ix] + b * Hd.d_B3[ix];
        }
      }
      const double lhs = mv_bracket(lin, Gd, z, grid, fx);
      const double rhs2 = a * bfg + b * mv_bracket(Hd, Gd, z, grid, fx);
      bilin = std::max(bilin, std::abs(lhs - rhs2) / std::max(1.0, std::abs(lhs)));
    }
    if (trial % 2 == 0) {
      const StateTangent xg = hamiltonian_vector_field(Gd, z, grid, fx);
      const double paired = pair_derivative_tangent(Fd, xg, grid);
      duality = std::max(duality, std::abs(paired - bfg) / std::max(1.0, std::abs(bfg)));
    }
  }
  rep.checks.push_back(leq("antisymmetry_max_residual", antisym, 1e-12));
  rep.checks.push_back(leq("bilinearity_max_residual", bilin, 1e-12));
  rep.checks.push_back(leq("duality_max_residual", duality, 1e-10));

  // Casimir annihilation under refinement: the Vlasov term of the bracket is
  // a total divergence, so the residual is pure quadrature error.
  std::vector<double> hs, res1, res2;
  for (const auto& [nx, nv] : {std::pair{32, 64}, {64, 128}, {128, 256}}) {
    const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, nx, 6.0, nv);
    Fourier fx(grid.Nx, grid.L);
    const State z = analytic_state(grid);
    FunctionalDerivative Fd = FunctionalDerivative::zeros(grid);
    Fd.d_f = analytic_phase(grid, 0);
    Fd.d_E1 = analytic_field(grid, 1);
    hs.push_back(grid.dv());
    res1.push_back(std::abs(mv_bracket(Fd, lp_casimir_derivative(z, grid, 1.0), z, grid, fx)));
    res2.push_back(std::abs(mv_bracket(Fd, lp_casimir_derivative(z, grid, 2.0), z, grid, fx)));
  }
  const double ord1 = fit_order(hs, res1, 1e-13);
  const double ord2 = fit_order(hs, res2, 1e-13);
  rep.checks.push_back(geq("casimir_annihilation_order_p1", ord1, 2.0,
                           "below-floor residuals count as passing"));
  rep.checks.push_back(geq("casimir_annihilation_order_p2", ord2, 2.0));
  rep.checks.push_back(leq("casimir_annihilation_residual_p2_finest", res2.back(), 1e-6));

  // Jacobi identity as a refinement study on linear observables
  std::vector<double> jres;
  for (const auto& [nx, nv] : {std::pair{32, 64}, {64, 128}, {128, 256}}) {
    const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, nx, 6.0, nv);
    Fourier fx(grid.Nx, grid.L);
    const State z = analytic_state(grid);
    FunctionalDerivative F = FunctionalDerivative::zeros(grid);
    F.d_f = analytic_phase(grid, 0);
    F.d_E1 = analytic_field(grid, 0);
    FunctionalDerivative G = FunctionalDerivative::zeros(grid);
    G.d_f = analytic_phase(grid, 1);
    G.d_E1 = analytic_field(grid, 1);
    FunctionalDerivative H = FunctionalDerivative::zeros(grid);
    H.d_f = analytic_phase(grid, 2);

    const FunctionalDerivative dFG = bracket_observable_derivative(F, G, grid, fx);
    const FunctionalDerivative dGH = bracket_observable_derivative(G, H, grid, fx);
    const FunctionalDerivative dHF = bracket_observable_derivative(H, F, grid, fx);
    const double jac = mv_bracket(dFG, H, z, grid, fx) +
                       mv_bracket(dGH, F, z, grid, fx) +
                       mv_bracket(dHF, G, z, grid, fx);
    jres.push_back(std::abs(jac));
  }
  const double jorder = fit_order(hs, jres, 1e-13);
  rep.checks.push_back(geq("jacobi_residual_order", jorder, 2.0));

  rep.json["casimir_residuals_p1"] = res1;
  rep.json["casimir_residuals_p2"] = res2;
  rep.json["jacobi_residuals"] = jres;
  rep.json["grid_spacings"] = hs;
  finalize(rep, cfg);
  return rep;
}

Report gnh_demo(const RunConfig& cfg) {
  using namespace mvtk::gnh;
  Report rep;
  rep.scenario = Name::gnh_demo;

  // free particle: dims [3, 2], stabilization at the first tangency step
  const PresymplecticSystem fp = free_particle_sr();
  const ConstraintChain fpc = gnh_iterate(fp);
  rep.checks.push_back(make_check("free_particle_dims", fpc.dims.size() == 2 ? 1 : 0, 1,
                                  fpc.dims == std::vector<int>{3, 2}));
  rep.checks.push_back(make_check("free_particle_stabilized_at", fpc.stabilized_at, 1,
                                  fpc.stabilized_at == 1));
  // C0 is {p = v}: the Legendre constraint of the degenerate velocity slot
  Eigen::VectorXd on(3), off(3);
  on << 0.3, 0.7, 0.7;
  off << 0.0, 1.0, 0.0;
  rep.checks.push_back(make_check(
      "free_particle_c0_is_p_eq_v", 1, 1,
      fpc.final_subspace().contains(on, 1e-9) && !fpc.final_subspace().contains(off, 1e-6)));

  const VectorFieldSolution vf = solve_vector_field(fp, fpc);
  Eigen::VectorXd zpt(3);
  zpt << 1.3, -0.4, -0.4;
  const Eigen::VectorXd X = vf.at(zpt);
  const double vf_err = (fp.omega * X + (fp.A * zpt + fp.b)).norm();
  rep.checks.push_back(leq("free_particle_vector_field_residual", vf_err, 1e-9));
  // on C_inf = {p = v} the free flow is qdot = v with the acceleration pinned
  rep.checks.push_back(leq("free_particle_qdot_is_v", std::abs(X(0) - zpt(1)), 1e-10));

  // electromagnetic toy: P_Phi = 0 at C0, the mode Gauss relation at C1
  const double k1 = 0.5, k2 = 1.0, rho1 = 0.3, rho2 = -0.2;
  const PresymplecticSystem em = em_two_mode_sr(k1, rho1, k2, rho2);
  const ConstraintChain emc = gnh_iterate(em);
  rep.checks.push_back(make_check("em_toy_dims", emc.dims.size(), 3,
                                  emc.dims == std::vector<int>{12, 8, 6}));
  bool pphi_zero = emc.dims.size() >= 2;
  if (pphi_zero) {
    const AffineSubspace& c0 = emc.subspaces[1];
    for (int slot : {4, 10}) {  // P_Phi of each mode
      pphi_zero = pphi_zero && std::abs(c0.basepoint(slot)) < 1e-9;
      pphi_zero = pphi_zero && c0.directions.row(slot).cwiseAbs().maxCoeff() < 1e-9;
    }
  }
  rep.checks.push_back(make_check("em_toy_pphi_zero_at_c0", pphi_zero ? 1 : 0, 1, pphi_zero));

  bool gauss_at_c1 = emc.dims.size() >= 3;
  if (gauss_at_c1) {
    const AffineSubspace& c1 = emc.subspaces[2];
    // mode Gauss relation: k Adot + k^2 Phi = rho (slots per mode block)
    const struct {
      int phi, adot;
      double k, rho;
    } modes[2] = {{0, 3, k1, rho1}, {6, 9, k2, rho2}};
    for (const auto& m : modes) {
      Eigen::RowVectorXd gvec = Eigen::RowVectorXd::Zero(12);
      gvec(m.adot) = m.k;
      gvec(m.phi) = m.k * m.k;
      gauss_at_c1 = gauss_at_c1 && std::abs(gvec * c1.basepoint - m.rho) < 1e-9;
      gauss_at_c1 = gauss_at_c1 && (gvec * c1.directions).cwiseAbs().maxCoeff() < 1e-9;
    }
  }
  rep.checks.push_back(make_check("em_toy_gauss_at_c1", gauss_at_c1 ? 1 : 0, 1, gauss_at_c1));
  // the leftover kernel on C_inf contains the gauge direction Phidot
  const VectorFieldSolution emvf = solve_vector_field(em, emc);
  bool gauge_kernel = emvf.kernel_basis.cols() >= 2;
  if (gauge_kernel) {
    Eigen::VectorXd ephidot = Eigen::VectorXd::Zero(12);
    ephidot(2) = 1.0;
    const Eigen::VectorXd r =
        ephidot - emvf.kernel_basis * (emvf.kernel_basis.transpose() * ephidot);
    gauge_kernel = r.norm() < 1e-9;
  }
  rep.checks.push_back(make_check("em_toy_gauge_direction_in_kernel",
                                  gauge_kernel ? 1 : 0, 1, gauge_kernel));

  // brute-force elimination oracle agreement on randomized systems
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int agree = 0;
  const int trials = 50;
  double worst_angle = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);  // 2..6
    Eigen::MatrixXd B(n, n), S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        B(i, j) = uni(rng);
        S(i, j) = uni(rng);
      }
    // degenerate skew form with controlled rank
    const int r = 1 + static_cast<int>(rng() % std::max(1, n / 2));
    Eigen::MatrixXd C(n, r), D(n, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) {
        C(i, j) = uni(rng);
        D(i, j) = uni(rng);
      }
    const Eigen::MatrixXd omega = C * D.transpose() - D * C.transpose();
    const Eigen::MatrixXd A = S + S.transpose();
    Eigen::VectorXd b(n);
    if (t % 10 < 7) {
      Eigen::VectorXd zstar(n);
      for (int i = 0; i < n; ++i) zstar(i) = uni(rng);
      b = -A * zstar;  // consistent by construction
    } else {
      for (int i = 0; i < n; ++i) b(i) = uni(rng);
    }
    const PresymplecticSystem sys = PresymplecticSystem::make(omega, A, b);
    const ConstraintChain chain = gnh_iterate(sys);
    const gnh::EliminationChain oracle = elimination_chain(sys);
    const ChainComparison cmpr = compare_chains(sys, chain, oracle);
    worst_angle = std::max(worst_angle, cmpr.max_angle);
    if (cmpr.agree(1e-8)) ++agree;
  }
  rep.checks.push_back(make_check("elimination_oracle_agreement", agree, trials,
                                  agree == trials));
  rep.checks.push_back(leq("elimination_oracle_max_angle", worst_angle, 1e-8));

  rep.json["free_particle"] = nlohmann::ordered_json::parse(chain_to_json(fp, fpc));
  rep.json["em_toy"] = nlohmann::ordered_json::parse(chain_to_json(em, emc));
  finalize(rep, cfg);
  return rep;
}

Report ec_stability(const RunConfig& cfg) {
  Report rep;
  rep.scenario = Name::ec_stability;
  const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, 32, 6.0, 128);
  Fourier fx(grid.Nx, grid.L);

  // Maxwellian: construct, stationarity residual, positive definiteness
  const Equilibrium eqm = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, grid, fx);
  const CasimirProfile prof = casimir_from_equilibrium(eqm, grid);
  const double fv = first_variation_residual(eqm, prof, grid);
  rep.checks.push_back(leq("maxwellian_first_variation", fv, 1e-8));
  rep.checks.push_back(leq("maxwellian_rhs_residual", eqm.rhs_residual_inf, 1e-8));

  const SecondVariationForm q = second_variation_form(eqm, prof, grid);
  const DefinitenessReport dr = definiteness_report(q, grid);
  rep.checks.push_back(make_check("maxwellian_verdict_positive_definite",
                                  dr.min_eigenvalue, 0.0,
                                  dr.verdict == Definiteness::positive_definite));
  rep.checks.push_back(geq("maxwellian_min_eigenvalue", dr.min_eigenvalue, 1e-12));

  // two-stream: no single-valued Casimir; the error carries the interval
  const PhaseGrid grid2 = PhaseGrid::es_1d1v(10.0 * M_PI, 32, 8.4, 128);
  Fourier fx2(grid2.Nx, grid2.L);
  const Equilibrium eq2 = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::two_stream(2.4, 1.0), Equilibrium::Kind::two_stream,
      grid2, fx2);
  bool raised = false;
  double vlo = 0.0, vhi = 0.0;
  try {
    casimir_from_equilibrium(eq2, grid2);
  } catch (const NonMonotoneCasimirError& e) {
    raised = true;
    vlo = e.v_lo;
    vhi = e.v_hi;
  }
  rep.checks.push_back(make_check("two_stream_error_raised", raised ? 1 : 0, 1, raised));
  // the rising stretch of F0 sits between v = 0 and the beam at u0 = 2.4
  const bool interval_ok = raised && vlo >= 0.0 && vlo < 0.5 && vhi > 2.0 && vhi < 2.6;
  rep.checks.push_back(make_check("two_stream_interval_located", interval_ok ? 1 : 0, 1,
                                  interval_ok));
  rep.json["two_stream_interval"] = {vlo, vhi};

  // randomized strictly-monotone-in-energy profiles are all formally stable
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uw(0.1, 1.0), us(0.8, 2.0);
  int pd = 0;
  const int draws = 20;
  double worst_min_eig = std::numeric_limits<double>::infinity();
  for (int t = 0; t < draws; ++t) {
    AnalyticVelocityProfile p;
    double smax = 0.0, total = 0.0;
    for (int c = 0; c < 3; ++c) {
      GaussianComponent gc{uw(rng), 0.0, us(rng)};
      smax = std::max(smax, gc.sigma);
      total += gc.density;
      p.components.push_back(gc);
    }
    for (auto& gc : p.components) gc.density /= total;
    const PhaseGrid g = PhaseGrid::es_1d1v(4.0 * M_PI, 16, 6.0 * smax, 96);
    Fourier f(g.Nx, g.L);
    const Equilibrium eq = make_homogeneous_equilibrium(p, Equilibrium::Kind::custom, g, f);
    const CasimirProfile cp = casimir_from_equilibrium(eq, g);
    const SecondVariationForm sv = second_variation_form(eq, cp, g);
    const DefinitenessReport d = definiteness_report(sv, g);
    worst_min_eig = std::min(worst_min_eig, d.min_eigenvalue);
    if (d.verdict == Definiteness::positive_definite &&
        first_variation_residual(eq, cp, g) < 1e-8)
      ++pd;
  }
  rep.checks.push_back(make_check("random_monotone_profiles_all_stable", pd, draws,
                                  pd == draws));

  rep.json["maxwellian_min_eigenvalue"] = dr.min_eigenvalue;
  rep.json["maxwellian_first_variation"] = fv;
  rep.json["random_profiles_worst_min_eigenvalue"] = worst_min_eig;
  rep.json["maxwellian_report"] = nlohmann::ordered_json::parse(dr.to_json());
  finalize(rep, cfg);
  return rep;
}

Report controlled_stabilization(const RunConfig& cfg) {
  Report rep;
  rep.scenario = Name::controlled_stabilization;
  const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, 32, 6.0, 128);
  Fourier fx(grid.Nx, grid.L);

  const Equilibrium eq = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, grid, fx);
  const auto f0 = eq.f0_velocity(grid);

  // Marginal witness: the target profile phi' = -v^2/2 - alpha g(v) fails
  // definiteness on the band where g falls off, and the shaping channel
  // w = g / F0 both restores criticality (u* = alpha exactly) and repairs
  // the second variation.
  const double alpha = 6.0, v0 = 2.0, sg = 0.6;
  auto bump = [&](double v) {
    const double a = (v - v0) / sg, b = (v + v0) / sg;
    return std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
  };
  std::vector<double> s_nodes, pp_nodes;
  for (int j = grid.Nv - 1; j >= grid.Nv / 2; --j) {
    const double v = grid.v(j);
    s_nodes.push_back(f0[j]);
    pp_nodes.push_back(-0.5 * v * v - alpha * bump(v));
  }
  const CasimirProfile target = CasimirProfile::from_tabulated(s_nodes, pp_nodes);

  std::vector<double> w(grid.phase_size());
  for (int ix = 0; ix < grid.Nx; ++ix)
    for (int j = 0; j < grid.Nv; ++j)
      w[grid.idx(ix, j)] = bump(grid.v(j)) / f0[j];
  std::vector<ControlChannel> channels = {ControlChannel::shaping(w, "band shaping")};

  const SecondVariationForm q0 = second_variation_form(eq, target, grid);
  const DefinitenessReport before = definiteness_report(q0, grid);
  rep.checks.push_back(make_check("uncontrolled_verdict_indefinite",
                                  before.min_eigenvalue, 0.0,
                                  before.verdict == Definiteness::indefinite));

  const ShiftReport shift = solve_equilibrium_shift(eq, channels, target, grid);
  rep.checks.push_back(make_check("shift_residual_reduced", shift.residual_after,
                                  shift.residual_before,
                                  shift.residual_after < 1e-8 * std::max(1.0, shift.residual_before)));
  rep.checks.push_back(leq("u_star_matches_construction",
                           std::abs(shift.u_star(0) - alpha), 1e-6));

  const ControlledSecondVariation after =
      controlled_second_variation(eq, shift.u_star, channels, target, grid);
  rep.checks.push_back(make_check("controlled_verdict_positive_definite",
                                  after.report.min_eigenvalue, 0.0,
                                  after.report.verdict == Definiteness::positive_definite));

  // power balance along the controlled flow over one RK4 step
  {
    ScenarioParams p;
    p.epsilon = 1e-3;
    const State z0 = initial_state(p, grid, fx);
    std::vector<double> jext(grid.Nx);
    for (int ix = 0; ix < grid.Nx; ++ix)
      jext[ix] = std::sin(2.0 * M_PI * grid.x(ix) / grid.L);
    std::vector<ControlChannel> cc = {ControlChannel::current(jext, "antenna")};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{ControlSignal::Kind::constant, 1.0, 0.0, 0.0, {}, {}});

    const double dt = 0.005;
    std::vector<State> stages;
    RhsFn f = [&](const State& s, double t) {
      return controlled_rhs(s, grid, fx, cc, sched, t);
    };
    // collect the four stage states of the step for the Simpson quadrature
    const StateTangent k1 = f(z0, 0.0);
    const State z2 = axpy(z0, 0.5 * dt, k1);
    const StateTangent k2 = f(z2, 0.5 * dt);
    const State z3 = axpy(z0, 0.5 * dt, k2);
    const StateTangent k3 = f(z3, 0.5 * dt);
    const State z4 = axpy(z0, dt, k3);
    const StepResult step = step_rk4(z0, grid, 0.0, dt, f);

    auto power = [&](const State& s) {
      return sched(0, 0.0) * channel_power(cc[0], s, grid, fx);
    };
    const double work = dt / 6.0 *
                        (power(z0) + 2.0 * power(z2) + 2.0 * power(z3) + power(z4));
    const double dh = total_energy(step.z, grid) - total_energy(z0, grid);
    const double rel = std::abs(dh - work) / std::max(1e-300, std::abs(dh));
    rep.checks.push_back(leq("power_balance_rel_err", rel, 1e-6));
    rep.json["power_dH"] = dh;
    rep.json["power_work"] = work;
  }

  // zero-control reduction: forcing with u = 0 reproduces the free flow exactly
  {
    ScenarioParams p;
    p.epsilon = 1e-3;
    p.t_end = 2.0;
    std::vector<double> jext(grid.Nx, 0.7);
    std::vector<ControlChannel> cc = {ControlChannel::current(jext, "idle antenna")};
    ControlSchedule sched;
    sched.u.push_back(ControlSignal{});  // constant 0
    const RhsFn forcing = make_control_forcing(cc, sched, grid, fx);
    const RunResult free_run = run(p, grid, fx);
    const RunResult ctrl_run = run(p, grid, fx, &forcing);
    double dmax = 0.0;
    for (std::size_t i = 0; i < free_run.final_state.f.size(); ++i)
      dmax = std::max(dmax,
                      std::abs(free_run.final_state.f[i] - ctrl_run.final_state.f[i]));
    for (int ix = 0; ix < grid.Nx; ++ix)
      dmax = std::max(dmax,
                      std::abs(free_run.final_state.E1[ix] - ctrl_run.final_state.E1[ix]));
    rep.checks.push_back(leq("zero_control_reduction_max_diff", dmax, 0.0,
                             "bitwise agreement with the uncontrolled flow"));
  }

  rep.json["alpha"] = alpha;
  rep.json["u_star"] = shift.u_star(0);
  rep.json["min_eigenvalue_before"] = before.min_eigenvalue;
  rep.json["min_eigenvalue_after"] = after.report.min_eigenvalue;
  rep.json["verdict_before"] = mvtk::to_string(before.verdict);
  rep.json["verdict_after"] = mvtk::to_string(after.report.verdict);
  rep.json["shift"] = nlohmann::ordered_json::parse(shift.to_json());
  rep.json["note"] = "quadratic shaping channels are an artifact extension, "
                     "not part of the core bracket algebra";
  finalize(rep, cfg);
  return rep;
}

Report convergence(const RunConfig& cfg) {
  Report rep;
  rep.scenario = Name::convergence;

  // rhs versus the Hamiltonian vector field of the energy
  std::vector<double> hs, agree;
  for (const auto& [nx, nv] : {std::pair{32, 64}, {64, 128}, {128, 256}}) {
    const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, nx, 6.0, nv);
    Fourier fx(grid.Nx, grid.L);
    ScenarioParams p;
    p.epsilon = 0.05;
    const State z = initial_state(p, grid, fx);
    const StateTangent a = rhs(z, grid, fx);
    const StateTangent b = hamiltonian_vector_field(energy_derivative(z, grid), z, grid, fx);
    agree.push_back(tangent_norm_inf(tangent_sub(a, b)));
    hs.push_back(grid.dv());
  }
  for (std::size_t i = 0; i < hs.size(); ++i)
    rep.checks.push_back(leq("rhs_vs_hvf_agreement_h" + std::to_string(i), agree[i],
                             1.0 * hs[i] * hs[i],
                             "velocity-boundary truncation dominates"));

  // RK4 order by Richardson halving
  {
    const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, 32, 6.0, 64);
    Fourier fx(grid.Nx, grid.L);
    ScenarioParams p;
    p.epsilon = 1e-2;
    const State z0 = initial_state(p, grid, fx);
    std::vector<double> dts = {0.02, 0.01, 0.005}, errs;
    for (double dt : dts) {
      const State one = step_rk4(z0, grid, fx, 0.0, dt).z;
      const State half = step_rk4(step_rk4(z0, grid, fx, 0.0, 0.5 * dt).z, grid, fx,
                                  0.5 * dt, 0.5 * dt).z;
      double d = 0.0;
      for (std::size_t i = 0; i < one.f.size(); ++i)
        d = std::max(d, std::abs(one.f[i] - half.f[i]));
      for (int ix = 0; ix < grid.Nx; ++ix)
        d = std::max(d, std::abs(one.E1[ix] - half.E1[ix]));
      errs.push_back(d);
    }
    const double order = fit_order(dts, errs);
    rep.checks.push_back(geq("rk4_local_order", order, 4.0));
    rep.json["rk4_errors"] = errs;
  }

  // Casimir drift improves at second order or better under refinement
  {
    std::vector<double> hs2, drift;
    for (const auto& [nx, nv] : {std::pair{16, 48}, {32, 96}, {64, 192}}) {
      const PhaseGrid grid = PhaseGrid::es_1d1v(4.0 * M_PI, nx, 6.0, nv);
      Fourier fx(grid.Nx, grid.L);
      ScenarioParams p;
      p.epsilon = 1e-2;
      p.t_end = 2.0;
      p.dt = 0.01;
      const RunResult rr = run(p, grid, fx);
      double d = 0.0;
      for (double c : rr.series.casimir2)
        d = std::max(d, std::abs(c - rr.series.casimir2.front()));
      drift.push_back(d / std::abs(rr.series.casimir2.front()));
      hs2.push_back(grid.dv());
    }
    // the trapezoid/central-difference pair conserves int f^2 to the
    // velocity-boundary/rounding floor, so drifts below 1e-12 relative carry
    // no measurable order and satisfy the O(h^2) improvement vacuously
    const double order = fit_order(hs2, drift, 1e-12);
    rep.checks.push_back(geq("casimir2_drift_order", order, 2.0,
                             "sub-floor drifts count as passing"));
    double worst = 0.0;
    for (double d : drift) worst = std::max(worst, d);
    rep.checks.push_back(leq("casimir2_drift_rel_worst", worst, 1e-5));
    rep.json["casimir2_drifts"] = drift;
  }

  rep.json["rhs_vs_hvf"] = agree;
  rep.json["grid_spacings"] = hs;
  finalize(rep, cfg);
  return rep;
}

Report dispatch(const RunConfig& cfg, DiagnosticSeries* series_out) {
  switch (cfg.scenario) {
    case Name::landau: return landau(cfg, series_out);
    case Name::two_stream: return two_stream(cfg, series_out);
    case Name::bracket_check: return bracket_check(cfg);
    case Name::gnh_demo: return gnh_demo(cfg);
    case Name::ec_stability: return ec_stability(cfg);
    case Name::controlled_stabilization: return controlled_stabilization(cfg);
    case Name::convergence: return convergence(cfg);
  }
  throw std::logic_error("dispatch: unreachable");
}

int run_scenario(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  {
    std::ofstream f(cfg.out_dir + "/effective_config.json", std::ios::binary);
    f << effective_config_json(cfg).dump(2) << "\n";
  }

  DiagnosticSeries series;
  Report rep = dispatch(cfg, &series);

  if (!series.t.empty()) series.write_csv(cfg.out_dir + "/diagnostics.csv");
  for (const auto& [name, body] : rep.artifacts) {
    std::ofstream f(cfg.out_dir + "/" + name, std::ios::binary);
    f << body;
  }
  {
    std::ofstream f(cfg.out_dir + "/report.json", std::ios::binary);
    f << rep.json.dump(2) << "\n";
  }
  {
    ordered_json summary;
    summary["scenario"] = to_string(cfg.scenario);
    summary["pass"] = rep.pass;
    int failed = 0;
    for (const auto& c : rep.checks)
      if (!c.pass) ++failed;
    summary["checks_total"] = rep.checks.size();
    summary["checks_failed"] = failed;
    std::ofstream f(cfg.out_dir + "/summary.json", std::ios::binary);
    f << summary.dump(2) << "\n";
  }
  return rep.pass ? 0 : 1;
}

}  // namespace mvtk::scenario
