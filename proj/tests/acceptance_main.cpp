// Acceptance suite: drives every criterion end to end at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mvtk/control.hpp"
#include "mvtk/energy_casimir.hpp"
#include "mvtk/equilibrium.hpp"
#include "mvtk/linear_stability.hpp"
#include "mvtk/scenario.hpp"

using namespace mvtk;
namespace sc = mvtk::scenario;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

bool scenario_passes(const sc::Report& rep, std::string& why) {
  for (const auto& c : rep.checks)
    if (!c.pass) {
      why += (why.empty() ? "" : "; ") + c.name + "=" + fmt(c.value);
      return false;
    }
  return true;
}

// 1. bracket algebra: antisymmetry/bilinearity < 1e-12 on 100 triples,
//    Casimir annihilation order >= 2 across the three grids, < 1 min
void criterion1() {
  Timer t;
  sc::RunConfig cfg = sc::default_config(sc::Name::bracket_check);
  const sc::Report rep = sc::bracket_check(cfg);
  std::string why;
  bool pass = scenario_passes(rep, why);
  const double secs = t.seconds();
  if (secs >= 60.0) {
    pass = false;
    why += "; runtime " + fmt(secs) + "s >= 60s";
  }
  report(1, "Lie-Poisson bracket algebra", pass,
         why.empty() ? "residuals at rounding level, runtime " + fmt(secs) + "s" : why);
}

// 2. GNH engine: free-particle dims [3,2], EM toy stages, 50-system
//    elimination-oracle agreement at angles < 1e-8, < 10 s
void criterion2() {
  Timer t;
  sc::RunConfig cfg = sc::default_config(sc::Name::gnh_demo);
  const sc::Report rep = sc::gnh_demo(cfg);
  std::string why;
  bool pass = scenario_passes(rep, why);
  const double secs = t.seconds();
  if (secs >= 10.0) {
    pass = false;
    why += "; runtime " + fmt(secs) + "s >= 10s";
  }
  report(2, "GNH constraint-chain engine", pass,
         why.empty() ? "chains + oracle agree, runtime " + fmt(secs) + "s" : why);
}

// 3. nonlinear dynamics: equilibrium constancy to 1e-10, Landau and
//    two-stream rates within 5% of the oracle, Gauss <= 1e-6, < 5 min each
void criterion3() {
  Timer t;
  std::string why;
  bool pass = true;

  {  // equilibrium run: every diagnostic constant to 1e-10
    const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 64, 6.0, 256);
    Fourier fx(g.Nx, g.L);
    ScenarioParams p;
    p.epsilon = 0.0;
    p.t_end = 20.0;
    const RunResult rr = run(p, g, fx);
    double worst = 0.0;
    for (std::size_t i = 0; i < rr.series.t.size(); ++i) {
      worst = std::max(worst, std::abs(rr.series.energy[i] - rr.series.energy[0]) /
                                  std::abs(rr.series.energy[0]));
      worst = std::max(worst, std::abs(rr.series.casimir1[i] - rr.series.casimir1[0]) /
                                  std::abs(rr.series.casimir1[0]));
      worst = std::max(worst, std::abs(rr.series.casimir2[i] - rr.series.casimir2[0]) /
                                  std::abs(rr.series.casimir2[0]));
      worst = std::max(worst, rr.series.gauss[i]);
    }
    if (worst > 1e-10 || !rr.series.error.empty()) {
      pass = false;
      why += "equilibrium drift " + fmt(worst);
    }
  }
  const double t_eq = t.seconds();

  Timer t_landau;
  {
    const sc::Report rep = sc::landau(sc::default_config(sc::Name::landau));
    pass = scenario_passes(rep, why) && pass;
    if (t_landau.seconds() >= 300.0) {
      pass = false;
      why += "; landau runtime >= 5 min";
    }
  }
  Timer t_ts;
  {
    const sc::Report rep = sc::two_stream(sc::default_config(sc::Name::two_stream));
    pass = scenario_passes(rep, why) && pass;
    if (t_ts.seconds() >= 300.0) {
      pass = false;
      why += "; two-stream runtime >= 5 min";
    }
  }
  report(3, "nonlinear Maxwell-Vlasov dynamics", pass,
         why.empty() ? "equilibrium " + fmt(t_eq) + "s, landau " +
                           fmt(t_landau.seconds() - 0.0) + "s, two-stream " +
                           fmt(t_ts.seconds()) + "s"
                     : why);
}

// 4. linear/nonlinear consistency: ||rhs(z0+eps dz) - eps L dz|| / eps^2
//    bounded and eps-independent within a factor 2 over eps in {1e-3..1e-5}
void criterion4() {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 32, 6.0, 128);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = make_homogeneous_equilibrium(
      AnalyticVelocityProfile::maxwellian(1.0), Equilibrium::Kind::maxwellian, g, fx);
  const LinearOperator op = build_linear_operator(eq, 1, g);

  // mode-1 perturbation shape: delta f = F0(v) cos(kx), delta E from Poisson
  const auto f0 = eq.f0_velocity(g);
  Eigen::VectorXcd yhat(g.Nv + 1);
  double rho = 0.0;
  for (int j = 0; j < g.Nv; ++j) {
    yhat(j) = f0[j];
    rho += g.vweight(j) * f0[j];
  }
  yhat(g.Nv) = g.q * rho / std::complex<double>(0.0, op.k);

  auto to_tangent = [&](const Eigen::VectorXcd& m) {
    StateTangent dz = StateTangent::zeros(g);
    for (int ix = 0; ix < g.Nx; ++ix) {
      const std::complex<double> ph =
          std::exp(std::complex<double>(0.0, op.k * g.x(ix)));
      for (int j = 0; j < g.Nv; ++j)
        dz.df[g.idx(ix, j)] = (m(j) * ph).real();
      dz.dE1[ix] = (m(g.Nv) * ph).real();
    }
    return dz;
  };
  const StateTangent dz = to_tangent(yhat);
  const StateTangent ldz = to_tangent(op.matrix * yhat);

  std::vector<double> ratios;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const State zp = axpy(eq.state, eps, dz);
    const StateTangent r = rhs(zp, g, fx);
    StateTangent residual = r;
    for (std::size_t k = 0; k < residual.df.size(); ++k) residual.df[k] -= eps * ldz.df[k];
    for (int ix = 0; ix < g.Nx; ++ix) residual.dE1[ix] -= eps * ldz.dE1[ix];
    ratios.push_back(tangent_norm2(residual, g) / (eps * eps));
  }
  double rmin = ratios[0], rmax = ratios[0];
  for (double r : ratios) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  const bool bounded = rmax < 10.0;  // O(1) quadratic coefficient at unit scales
  const bool stable = rmax <= 2.0 * rmin;
  report(4, "linear/nonlinear consistency", bounded && stable,
         "residual/eps^2 in [" + fmt(rmin) + ", " + fmt(rmax) + "]");
}

// 5. Goldstone neutral mode: relaxed state with r0 < 1e-6 has translation
//    residual <= 100 r0; negative control >= 1e3 larger
void criterion5() {
  const PhaseGrid g = PhaseGrid::es_1d1v(4 * M_PI, 64, 6.0, 256);
  Fourier fx(g.Nx, g.L);
  const Equilibrium eq = make_pinned_equilibrium(g, fx, 0.1, 1);
  const NeutralModeReport rep = neutral_mode_residual(eq, g, fx);

  bool pass = eq.rhs_residual_l2 < 1e-6;
  std::string why = "r0 = " + fmt(eq.rhs_residual_l2);
  pass = pass && !rep.trivially_neutral && rep.residual <= 100.0 * eq.rhs_residual_l2;
  why += ", translation residual = " + fmt(rep.residual);

  Equilibrium fake;
  fake.kind = Equilibrium::Kind::custom;
  fake.homogeneous = false;
  ScenarioParams p;
  p.epsilon = 0.3;
  fake.state = initial_state(p, g, fx);
  const NeutralModeReport neg = neutral_mode_residual(fake, g, fx);
  pass = pass && neg.residual >= 1e3 * rep.residual;
  why += ", negative control = " + fmt(neg.residual);
  report(5, "Goldstone translation mode", pass, why);
}

// 6. energy-Casimir: Maxwellian critical + positive definite; two-stream
//    rejected on the non-monotone interval; 20 random monotone profiles stable
void criterion6() {
  const sc::Report rep = sc::ec_stability(sc::default_config(sc::Name::ec_stability));
  std::string why;
  const bool pass = scenario_passes(rep, why);
  report(6, "energy-Casimir stability", pass,
         why.empty() ? "first variation, definiteness, rejection interval, 20 draws"
                     : why);
}

// 7. controlled stabilization: verdict flips with the computed u*, power
//    balance within 1e-6 per step, zero-control reduction exact
void criterion7() {
  const sc::Report rep =
      sc::controlled_stabilization(sc::default_config(sc::Name::controlled_stabilization));
  std::string why;
  const bool pass = scenario_passes(rep, why);
  report(7, "controlled stabilization", pass,
         why.empty() ? "indefinite -> positive-definite at u*, power balance, reduction"
                     : why);
}

// 8. determinism: identical config + seed give byte-identical reports
void criterion8() {
  namespace fs = std::filesystem;
  auto run_to = [&](const std::string& dir, sc::Name name) {
    sc::RunConfig cfg = sc::default_config(name);
    cfg.out_dir = dir;
    cfg.seed = 1234;
    sc::run_scenario(cfg);
    std::ifstream f(dir + "/report.json", std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  bool pass = true;
  std::string why;
  for (sc::Name name : {sc::Name::bracket_check, sc::Name::gnh_demo, sc::Name::landau}) {
    const std::string base = (fs::temp_directory_path() / "mvtk_acc").string();
    const std::string a = run_to(base + "_a", name);
    const std::string b = run_to(base + "_b", name);
    fs::remove_all(base + "_a");
    fs::remove_all(base + "_b");
    if (a != b || a.empty()) {
      pass = false;
      why += sc::to_string(name) + " differs; ";
    }
  }
  report(8, "byte-identical reports", pass, pass ? "3 scenarios, 2 runs each" : why);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "NOT OK", failures);
  return failures;
}
