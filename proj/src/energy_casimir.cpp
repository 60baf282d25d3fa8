#include "mvtk/energy_casimir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace mvtk {

namespace {

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.
std::vector<double> monotone_slopes(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // clamp the endpoint slopes into the monotone region
  for (std::size_t i : {std::size_t(0), n - 1}) {
    const double del = (i == 0) ? delta[0] : delta[n - 2];
    if (d[i] * del <= 0.0)
      d[i] = 0.0;
    else if (std::abs(d[i]) > 3.0 * std::abs(del))
      d[i] = 3.0 * del;
  }
  return d;
}

struct Hermite {
  double x0, x1, y0, y1, d0, d1;
  double value(double x) const {
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) +
           y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
  }
  double derivative(double x) const {
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t;
    return (y0 * (6 * t2 - 6 * t) / h + d0 * (3 * t2 - 4 * t + 1) +
            y1 * (-6 * t2 + 6 * t) / h + d1 * (3 * t2 - 2 * t));
  }
};

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGLx[8] = {-0.96028985649753623, -0.79666647741362674,
                            -0.52553240991632899, -0.18343464249564980,
                            0.18343464249564980,  0.52553240991632899,
                            0.79666647741362674,  0.96028985649753623};
constexpr double kGLw[8] = {0.10122853629037626, 0.22238103445337447,
                            0.31370664587788729, 0.36268378337836198,
                            0.36268378337836198, 0.31370664587788729,
                            0.22238103445337447, 0.10122853629037626};

}  // namespace

int CasimirProfile::segment(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  int i = static_cast<int>(it - t_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(t_.size()) - 2);
  return i;
}

void CasimirProfile::build() {
  d_ = monotone_slopes(t_, y_);
  // cumulative phi(s) = integral phi'(s) ds = integral y(t) e^t dt
  const std::size_t n = t_.size();
  phi_nodes_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Hermite hseg{t_[i], t_[i + 1], y_[i], y_[i + 1], d_[i], d_[i + 1]};
    const double mid = 0.5 * (t_[i] + t_[i + 1]);
    const double half = 0.5 * (t_[i + 1] - t_[i]);
    double acc = 0.0;
    for (int g = 0; g < 8; ++g) {
      const double t = mid + half * kGLx[g];
      acc += kGLw[g] * hseg.value(t) * std::exp(t);
    }
    phi_nodes_[i + 1] = phi_nodes_[i] + half * acc;
  }
  smin_ = std::exp(t_.front());
  smax_ = std::exp(t_.back());
}

double CasimirProfile::phi_prime(double s) const {
  const double s_floor = smin_ * 1e-12;
  const double t = std::log(std::max(s, s_floor));
  if (t <= t_.front()) return y_.front() + d_.front() * (t - t_.front());
  if (t >= t_.back()) return y_.back() + d_.back() * (t - t_.back());
  const int i = segment(t);
  return Hermite{t_[i], t_[i + 1], y_[i], y_[i + 1], d_[i], d_[i + 1]}.value(t);
}

double CasimirProfile::phi_double_prime(double s) const {
  const double s_floor = smin_ * 1e-12;
  const double sc = std::max(s, s_floor);
  const double t = std::log(sc);
  double dydt;
  if (t <= t_.front())
    dydt = d_.front();
  else if (t >= t_.back())
    dydt = d_.back();
  else {
    const int i = segment(t);
    dydt = Hermite{t_[i], t_[i + 1], y_[i], y_[i + 1], d_[i], d_[i + 1]}.derivative(t);
  }
  return dydt / sc;
}

double CasimirProfile::phi(double s) const {
  const double s_floor = smin_ * 1e-12;
  if (s <= s_floor)
    return phi_nodes_.front() + phi_prime(smin_) * (s - smin_);
  const double t = std::log(s);
  if (t <= t_.front())
    return phi_nodes_.front() + phi_prime(smin_) * (s - smin_);  // linear extension
  if (t >= t_.back())
    return phi_nodes_.back() + phi_prime(smax_) * (s - smax_);
  const int i = segment(t);
  const Hermite hseg{t_[i], t_[i + 1], y_[i], y_[i + 1], d_[i], d_[i + 1]};
  const double mid = 0.5 * (t_[i] + t);
  const double half = 0.5 * (t - t_[i]);
  double acc = 0.0;
  for (int g = 0; g < 8; ++g) {
    const double tg = mid + half * kGLx[g];
    acc += kGLw[g] * hseg.value(tg) * std::exp(tg);
  }
  return phi_nodes_[i] + half * acc;
}

CasimirProfile CasimirProfile::from_tabulated(std::vector<double> s_nodes,
                                              std::vector<double> phi_prime_nodes) {
  if (s_nodes.size() != phi_prime_nodes.size() || s_nodes.size() < 2)
    throw std::invalid_argument("CasimirProfile: need matching node tables, size >= 2");
  CasimirProfile p;
  p.t_.resize(s_nodes.size());
  for (std::size_t i = 0; i < s_nodes.size(); ++i) {
    if (!(s_nodes[i] > 0.0))
      throw std::invalid_argument("CasimirProfile: s nodes must be positive");
    if (i > 0 && !(s_nodes[i] > s_nodes[i - 1]))
      throw std::invalid_argument("CasimirProfile: s nodes must increase strictly");
    p.t_[i] = std::log(s_nodes[i]);
  }
  p.y_ = std::move(phi_prime_nodes);
  p.build();
  return p;
}

CasimirProfile casimir_from_equilibrium(const Equilibrium& eq, const PhaseGrid& grid) {
  if (!eq.homogeneous || !eq.profile)
    throw std::invalid_argument("casimir_from_equilibrium: homogeneous equilibrium required");
  if (grid.config != GridConfig::ES_1D1V)
    throw std::invalid_argument("casimir_from_equilibrium: ES_1D1V only");
  return casimir_from_f0(eq.f0_velocity(grid), grid);
}

CasimirProfile casimir_from_f0(const std::vector<double>& f0, const PhaseGrid& grid) {
  if (f0.size() != static_cast<std::size_t>(grid.Nv))
    throw std::invalid_argument("casimir_from_f0: velocity-grid shape mismatch");
  const int nv = grid.Nv;

  // evenness of F0 on the symmetric grid
  double fmax = 0.0;
  for (double x : f0) fmax = std::max(fmax, std::abs(x));
  for (int j = 0; j < nv / 2; ++j)
    if (std::abs(f0[j] - f0[nv - 1 - j]) > 1e-10 * fmax)
      throw NonMonotoneCasimirError(
          "no single-valued Casimir: F0 is not even in v, so it is not a "
          "function of the particle energy",
          grid.v(j), grid.v(nv - 1 - j));

  // strict decrease along |v| on the upper half
  const int j0 = nv / 2;  // first node with v > 0 (even Nv) or v = 0 (odd)
  double bad_lo = 0.0, bad_hi = 0.0;
  bool rising = false, flat = false;
  double flat_lo = 0.0, flat_hi = 0.0;
  for (int j = j0; j + 1 < nv; ++j) {
    const double a = f0[j], b = f0[j + 1];
    if (b > a + 1e-14 * fmax) {
      if (!rising) bad_lo = grid.v(j);
      bad_hi = grid.v(j + 1);
      rising = true;
    } else if (std::abs(b - a) <= 1e-14 * fmax) {
      if (!flat) flat_lo = grid.v(j);
      flat_hi = grid.v(j + 1);
      flat = true;
    }
  }
  if (rising)
    throw NonMonotoneCasimirError(
        "no single-valued Casimir: F0 increases with |v| on the reported interval",
        bad_lo, bad_hi);
  if (flat)
    throw DegenerateCasimirError(
        "dF0/de = 0 on the reported interval: the energy profile is not invertible",
        flat_lo, flat_hi);

  // tabulate phi'(s) = -e(s) on the upper-half nodes, ascending in s
  std::vector<double> s_nodes, pp_nodes;
  s_nodes.reserve(nv - j0);
  for (int j = nv - 1; j >= j0; --j) {
    const double v = grid.v(j);
    if (!(f0[j] > 0.0))
      throw std::domain_error("casimir_from_f0: F0 must be positive on the "
                              "grid (velocity cutoff too wide)");
    s_nodes.push_back(f0[j]);
    pp_nodes.push_back(-0.5 * v * v);
  }
  return CasimirProfile::from_tabulated(std::move(s_nodes), std::move(pp_nodes));
}

double first_variation_residual(const Equilibrium& eq, const CasimirProfile& profile,
                                const PhaseGrid& grid) {
  if (!eq.homogeneous || !eq.profile)
    throw std::invalid_argument("first_variation_residual: homogeneous equilibrium required");
  const auto f0 = eq.f0_velocity(grid);
  double r = 0.0;
  for (int j = 0; j < grid.Nv; ++j) {
    const double v = grid.v(j);
    r = std::max(r, std::abs(0.5 * v * v + profile.phi_prime(f0[j])));
  }
  return r + max_abs(eq.state.E1);
}

double SecondVariationForm::evaluate(const StateTangent& dz, const PhaseGrid& grid) const {
  double acc = 0.0;
  for (int ix = 0; ix < grid.Nx; ++ix)
    for (int j = 0; j < grid.Nv; ++j) {
      const double x = dz.df[grid.idx(ix, j)];
      acc += f_weight[j] * grid.vweight(j) * x * x;
    }
  double fe = 0.0;
  for (double x : dz.dE1) fe += x * x;
  for (double x : dz.dE2) fe += x * x;
  for (double x : dz.dB3) fe += x * x;
  return (acc + field_weight * fe) * grid.dx();
}

SecondVariationForm second_variation_form(const Equilibrium& eq,
                                          const CasimirProfile& profile,
                                          const PhaseGrid& grid) {
  SecondVariationForm form;
  const auto f0 = eq.f0_velocity(grid);
  form.f_weight.resize(grid.Nv);
  for (int j = 0; j < grid.Nv; ++j)
    form.f_weight[j] = profile.phi_double_prime(f0[j]);
  return form;
}

std::string to_string(Definiteness v) {
  switch (v) {
    case Definiteness::positive_definite: return "positive-definite";
    case Definiteness::indefinite: return "indefinite";
    default: return "degenerate";
  }
}

std::string DefinitenessReport::to_json() const {
  nlohmann::ordered_json j;
  j["min_eigenvalue"] = min_eigenvalue;
  j["min_mode"] = min_mode;
  j["verdict"] = to_string(verdict);
  j["projector_corank"] = projector_corank;
  j["formally_stable"] = (verdict == Definiteness::positive_definite);
  return j.dump(2);
}

DefinitenessReport definiteness_report(const SecondVariationForm& form,
                                       const PhaseGrid& grid,
                                       const Eigen::MatrixXcd* projector) {
  if (grid.config != GridConfig::ES_1D1V)
    throw std::invalid_argument("definiteness_report: ES_1D1V only");
  using cplx = std::complex<double>;
  const int nv = grid.Nv;
  const double q = grid.q;

  double wscale = 1.0;
  for (double w : form.f_weight) wscale = std::max(wscale, std::abs(w));
  const double tol_verdict = 1e-10 * wscale;

  DefinitenessReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  bool any_space = false;

  if (projector) {
    if (projector->rows() != nv + 1 || projector->cols() != nv + 1)
      throw std::invalid_argument("definiteness_report: projector dimension mismatch");
    rep.projector_corank = nv + 1 - static_cast<int>(
        Eigen::JacobiSVD<Eigen::MatrixXcd>(*projector).singularValues().array()
            .unaryExpr([](double s) { return s > 0.5 ? 1.0 : 0.0; })
            .sum());
  }

  for (int m = 0; m <= grid.Nx / 2; ++m) {
    // lifted basis: delta E slaved to delta f through the mode-m Poisson solve
    Eigen::MatrixXcd Vs = Eigen::MatrixXcd::Zero(nv + 1, nv);
    for (int j = 0; j < nv; ++j) Vs(j, j) = 1.0;
    if (m >= 1) {
      const double k = 2.0 * M_PI * m / grid.L;
      for (int j = 0; j < nv; ++j)
        Vs(nv, j) = q * grid.vweight(j) / cplx(0.0, k);
    }
    if (projector) Vs = (*projector) * Vs;
    // orthonormal basis of the test space
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Vs, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() ? sv(0) * 1e-12 : 0.0;
    int r = 0;
    while (r < sv.size() && sv(r) > cut) ++r;
    if (r == 0) continue;
    const Eigen::MatrixXcd U = svd.matrixU().leftCols(r);

    Eigen::VectorXd adiag(nv + 1), bdiag(nv + 1);
    for (int j = 0; j < nv; ++j) {
      adiag(j) = form.f_weight[j] * grid.vweight(j);
      bdiag(j) = grid.vweight(j);
    }
    adiag(nv) = form.field_weight;
    bdiag(nv) = 1.0;

    const Eigen::MatrixXcd A = U.adjoint() * adiag.asDiagonal() * U;
    const Eigen::MatrixXcd B = U.adjoint() * bdiag.asDiagonal() * U;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(A, B);
    if (ges.info() != Eigen::Success)
      throw std::runtime_error("definiteness_report: generalized eigensolver failed");
    const double mn = ges.eigenvalues().minCoeff();
    any_space = true;
    if (mn < rep.min_eigenvalue) {
      rep.min_eigenvalue = mn;
      rep.min_mode = m;
    }
  }

  if (!any_space) {
    rep.min_eigenvalue = 0.0;
    rep.verdict = Definiteness::degenerate;
    return rep;
  }
  if (rep.min_eigenvalue > tol_verdict)
    rep.verdict = Definiteness::positive_definite;
  else if (rep.min_eigenvalue < -tol_verdict)
    rep.verdict = Definiteness::indefinite;
  else
    rep.verdict = Definiteness::degenerate;
  return rep;
}

double energy_casimir_functional(const State& z, const CasimirProfile& profile,
                                 const PhaseGrid& grid) {
  const double c = integral_of(z.f, grid, [&](double s) { return profile.phi(s); });
  return total_energy(z, grid) + c;
}

}  // namespace mvtk
