#include "mvtk/linear_stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mvtk/spectral.hpp"

namespace mvtk {

namespace {
using cplx = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

LinearOperator build_linear_operator(const Equilibrium& eq, int k_mode,
                                     const PhaseGrid& grid) {
  if (!eq.homogeneous)
    throw std::invalid_argument(
        "build_linear_operator: inhomogeneous equilibria are unsupported");
  if (grid.config != GridConfig::ES_1D1V)
    throw std::invalid_argument("build_linear_operator: ES_1D1V only");
  if (k_mode < 1)
    throw std::invalid_argument(
        "build_linear_operator: k = 0 is rejected (neutralized mode); need mode >= 1");

  const int nv = grid.Nv;
  const double k = kTwoPi * k_mode / grid.L;
  const double q = grid.q;

  // F0 and its stencil derivative on the velocity grid
  std::vector<double> f0 = eq.f0_velocity(grid);
  std::vector<double> df0(nv);
  ddv_line(f0.data(), df0.data(), nv, grid.dv(), 1);

  LinearOperator op;
  op.k = k;
  op.mode = k_mode;
  op.matrix = Eigen::MatrixXcd::Zero(nv + 1, nv + 1);
  for (int j = 0; j < nv; ++j) {
    op.matrix(j, j) = cplx(0.0, -k * grid.v(j));
    op.matrix(j, nv) = cplx(-q * df0[j], 0.0);
    op.matrix(nv, j) = cplx(-q * grid.vweight(j) * grid.v(j), 0.0);
  }
  op.block_labels = {"delta_f(v)", "delta_E"};
  return op;
}

std::vector<EigenvalueInfo> spectrum(const LinearOperator& op, double neutral_tol) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigensolver failed (k = " + std::to_string(op.k) +
                             ", dim = " + std::to_string(op.dim()) + ")");
  std::vector<EigenvalueInfo> out(op.dim());
  for (int i = 0; i < op.dim(); ++i) {
    out[i].lambda = es.eigenvalues()(i);
    out[i].neutral = std::abs(out[i].lambda.real()) < neutral_tol;
  }
  std::sort(out.begin(), out.end(), [](const EigenvalueInfo& a, const EigenvalueInfo& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() > b.lambda.imag();
  });
  return out;
}

EffectiveProjector effective_projector(const LinearOperator& op, double tol) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("effective_projector: eigensolver failed");
  const int n = op.dim();
  std::vector<int> neutral;
  for (int i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i).real()) < tol) neutral.push_back(i);

  EffectiveProjector out;
  out.P = Eigen::MatrixXcd::Identity(n, n);
  if (neutral.empty()) return out;

  Eigen::MatrixXcd V(n, neutral.size());
  for (std::size_t c = 0; c < neutral.size(); ++c)
    V.col(c) = es.eigenvectors().col(neutral[c]);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = s(0) * 1e-8;
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  Eigen::MatrixXcd U;
  if (r < static_cast<int>(neutral.size())) {
    // defective or ill-conditioned neutral cluster: fall back to the singular
    // subspace of the operator itself
    out.fallback_warning = true;
    Eigen::JacobiSVD<Eigen::MatrixXcd> osvd(op.matrix, Eigen::ComputeFullV);
    const auto& os = osvd.singularValues();
    const double ocut = std::max(os(0) * tol, tol);
    int rank = 0;
    while (rank < os.size() && os(rank) > ocut) ++rank;
    U = osvd.matrixV().rightCols(n - rank);
  } else {
    U = svd.matrixU().leftCols(r);
  }
  out.corank = static_cast<int>(U.cols());
  out.P -= U * U.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// dispersion oracle

namespace {

// 16-point Gauss-Legendre rule on [-1, 1]
constexpr double kGL16x[16] = {
    -0.98940093499164993, -0.94457502307323258, -0.86563120238783175,
    -0.75540440835500303, -0.61787624440264375, -0.45801677765722739,
    -0.28160355077925891, -0.09501250983763744, 0.09501250983763744,
    0.28160355077925891,  0.45801677765722739,  0.61787624440264375,
    0.75540440835500303,  0.86563120238783175,  0.94457502307323258,
    0.98940093499164993};
constexpr double kGL16w[16] = {
    0.027152459411754095, 0.062253523938647893, 0.095158511682492785,
    0.12462897125553387,  0.14959598881657673,  0.16915651939500254,
    0.18260341504492359,  0.18945061045506850,  0.18945061045506850,
    0.18260341504492359,  0.16915651939500254,  0.14959598881657673,
    0.12462897125553387,  0.095158511682492785, 0.062253523938647893,
    0.027152459411754095};

// Panel edges for the regularized Landau integrand: uniform panels at the
// scale of the narrowest profile feature plus a geometric cluster around the
// (real part of the) pole, where the integrand varies on the |Im zeta| scale.
std::vector<double> panel_edges(double V, double vr, double sigma_min, double delta) {
  std::vector<double> edges;
  const double w0 = 0.5 * sigma_min;
  for (double x = -V; x < V - 0.5 * w0; x += w0) edges.push_back(x);
  edges.push_back(V);
  if (vr > -V && vr < V) {
    const double d0 = std::max(0.5 * delta, 1e-5 * sigma_min);
    for (double d = d0; d < 3.0 * w0; d *= 2.0) {
      for (double e : {vr - d, vr + d})
        if (e > -V && e < V) edges.push_back(e);
    }
    edges.push_back(std::max(-V, std::min(V, vr)));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double a, double b) { return b - a < 1e-7 * sigma_min; }),
              edges.end());
  return edges;
}

template <class F>
cplx panel_quadrature(const F& f, const std::vector<double>& edges) {
  cplx acc = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    cplx sum = 0.0;
    for (int g = 0; g < 16; ++g) sum += kGL16w[g] * f(mid + half * kGL16x[g]);
    acc += half * sum;
  }
  return acc;
}

cplx profile_d2(const AnalyticVelocityProfile& F0, cplx v) {
  // second derivative of a Gaussian sum: F'' = ((xi^2 - 1)/sigma^2) F per term
  cplx s = 0.0;
  constexpr double inv_sqrt2pi = 0.39894228040143267794;
  for (const auto& c : F0.components) {
    const cplx xi = (v - c.mean) / c.sigma;
    const cplx val = (c.density * inv_sqrt2pi / c.sigma) * std::exp(-0.5 * xi * xi);
    s += val * (xi * xi - 1.0) / (c.sigma * c.sigma);
  }
  return s;
}

// Landau-contour integral of F0'/(v - zeta): the regularized entire part by
// panel quadrature plus the closed-form log of the subtracted pole, with the
// residue term switching on as zeta crosses into the lower half plane.
cplx landau_integral(const AnalyticVelocityProfile& F0, cplx zeta) {
  double V = std::abs(zeta.real()) + 10.0;
  double sigma_min = F0.components.empty() ? 1.0 : F0.components[0].sigma;
  for (const auto& c : F0.components) {
    V = std::max(V, std::abs(c.mean) + 12.0 * c.sigma);
    sigma_min = std::min(sigma_min, c.sigma);
  }

  const cplx dF_at_zeta = F0.derivative(zeta);
  auto integrand = [&](double v) -> cplx {
    const cplx dv = v - zeta;
    if (std::abs(dv) < 1e-9) return profile_d2(F0, zeta);
    return (F0.derivative(v) - dF_at_zeta) / dv;
  };
  const auto edges =
      panel_edges(V, zeta.real(), sigma_min, std::abs(zeta.imag()));
  const cplx entire = panel_quadrature(integrand, edges);

  cplx logpart = std::log(V - zeta) - std::log(-V - zeta);
  if (zeta.imag() < 0.0)
    logpart += cplx(0.0, kTwoPi);  // continuation from above: full residue
  else if (zeta.imag() == 0.0)
    logpart += cplx(0.0, 0.5 * kTwoPi);  // principal value plus half residue
  return entire + dF_at_zeta * logpart;
}

}  // namespace

cplx dielectric(const AnalyticVelocityProfile& F0, double k, cplx omega) {
  const cplx zeta = omega / k;
  return 1.0 - landau_integral(F0, zeta) / (k * k);
}

cplx dispersion_root_oracle(const AnalyticVelocityProfile& F0, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("dispersion_root_oracle: k must be > 0");

  double vspan = 0.0;
  for (const auto& c : F0.components)
    vspan = std::max(vspan, std::abs(c.mean) + 6.0 * c.sigma);

  const double re_max = std::max(2.0, k * vspan + 1.5);
  const double im_max = 1.5;
  const int nre = 49, nim = 33;

  // coarse |D| scan over the upper-right quadrant window
  std::vector<std::vector<double>> mag(nre, std::vector<double>(nim));
  std::vector<std::vector<cplx>> pts(nre, std::vector<cplx>(nim));
  for (int i = 0; i < nre; ++i)
    for (int jj = 0; jj < nim; ++jj) {
      const cplx w(re_max * i / (nre - 1.0), -im_max + 2.0 * im_max * jj / (nim - 1.0));
      pts[i][jj] = w;
      mag[i][jj] = std::abs(dielectric(F0, k, w));
    }

  struct Candidate {
    cplx w;
    double mag;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < nre; ++i)
    for (int jj = 0; jj < nim; ++jj) {
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jx = jj + dj;
          if (ii < 0 || ii >= nre || jx < 0 || jx >= nim || (di == 0 && dj == 0)) continue;
          if (mag[ii][jx] < mag[i][jj]) {
            is_min = false;
            break;
          }
        }
      if (is_min) cands.push_back({pts[i][jj], mag[i][jj]});
    }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.mag < b.mag; });
  if (cands.size() > 10) cands.resize(10);

  std::vector<cplx> roots, minima;
  for (const auto& c : cands) {
    minima.push_back(c.w);
    cplx w = c.w;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const cplx d = dielectric(F0, k, w);
      if (std::abs(d) < 1e-13) {
        converged = true;
        break;
      }
      const double h = 1e-6 * (1.0 + std::abs(w));
      const cplx dp = dielectric(F0, k, w + cplx(h, 0.0));
      const cplx dm = dielectric(F0, k, w - cplx(h, 0.0));
      const cplx deriv = (dp - dm) / (2.0 * h);
      if (std::abs(deriv) < 1e-300) break;
      const cplx step = d / deriv;
      w -= step;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(w))) {
        converged = std::abs(dielectric(F0, k, w)) < 1e-9;
        break;
      }
      if (std::abs(w) > 10.0 * (re_max + im_max)) break;
    }
    if (!converged) continue;
    if (w.real() < 0.0) w = -std::conj(w);  // canonical member of the +/- pair
    bool dup = false;
    for (const auto& r : roots)
      if (std::abs(r - w) < 1e-6 * (1.0 + std::abs(w))) dup = true;
    if (!dup) roots.push_back(w);
  }
  if (roots.empty())
    throw OracleRootError("dispersion_root_oracle: no root found in search window",
                          minima);
  return *std::max_element(roots.begin(), roots.end(),
                           [](const cplx& a, const cplx& b) { return a.imag() < b.imag(); });
}

// ---------------------------------------------------------------------------

NeutralModeReport neutral_mode_residual(const Equilibrium& eq, const PhaseGrid& grid,
                                        const Fourier& fx, SymmetryGenerator generator) {
  (void)generator;  // x_translation is the only generator in this geometry
  NeutralModeReport rep;
  const StateTangent dz = translation_direction(eq.state, grid, fx);
  rep.direction_norm = tangent_norm2(dz, grid);
  const double scale = std::max(1.0, state_norm2(eq.state, grid));
  if (rep.direction_norm < 1e-13 * scale) {
    rep.trivially_neutral = true;
    rep.residual = 0.0;
    return rep;
  }
  // normalized direction
  StateTangent u = dz;
  const double inv = 1.0 / rep.direction_norm;
  for (auto& x : u.df) x *= inv;
  for (auto& x : u.dE1) x *= inv;
  for (auto& x : u.dE2) x *= inv;
  for (auto& x : u.dB3) x *= inv;

  // cube-root-of-epsilon step; rhs is quadratic in the state, so the central
  // difference is the exact Frechet action up to rounding
  const double h = 6.06e-6 * scale;
  const State zp = axpy(eq.state, h, u);
  const State zm = axpy(eq.state, -h, u);
  const StateTangent rp = rhs(zp, grid, fx);
  const StateTangent rm = rhs(zm, grid, fx);
  StateTangent l = tangent_sub(rp, rm);
  const double c = 1.0 / (2.0 * h);
  for (auto& x : l.df) x *= c;
  for (auto& x : l.dE1) x *= c;
  for (auto& x : l.dE2) x *= c;
  for (auto& x : l.dB3) x *= c;
  rep.residual = tangent_norm2(l, grid);
  return rep;
}

DecayFit linear_field_energy_rate(const LinearOperator& op, const Equilibrium& eq,
                                  const PhaseGrid& grid, double t_end, double dt,
                                  double fit_t_min, double fit_t_max) {
  const int nv = grid.Nv;
  Eigen::VectorXcd y(nv + 1);
  // density-perturbation shape with the self-consistent Poisson field
  double rho = 0.0;
  const auto f0 = eq.f0_velocity(grid);
  for (int j = 0; j < nv; ++j) {
    y(j) = f0[j];
    rho += grid.vweight(j) * f0[j];
  }
  y(nv) = grid.q * rho / cplx(0.0, op.k);

  const int nsteps = static_cast<int>(std::ceil(t_end / dt));
  std::vector<double> ts, es;
  ts.reserve(nsteps + 1);
  es.reserve(nsteps + 1);
  auto push = [&](double t) {
    ts.push_back(t);
    es.push_back(grid.L * std::norm(y(nv)));
  };
  push(0.0);
  const Eigen::MatrixXcd& M = op.matrix;
  for (int n = 0; n < nsteps; ++n) {
    const Eigen::VectorXcd k1 = M * y;
    const Eigen::VectorXcd k2 = M * (y + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = M * (y + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = M * (y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    push((n + 1) * dt);
  }
  return fit_decay_rate(ts, es, fit_t_min, fit_t_max);
}

std::string spectrum_to_csv(const LinearOperator& op,
                            const std::vector<EigenvalueInfo>& eigs) {
  std::string out = "k,re_lambda,im_lambda,neutral\n";
  char buf[128];
  for (const auto& e : eigs) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", op.k, e.lambda.real(),
                  e.lambda.imag(), e.neutral ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace mvtk
