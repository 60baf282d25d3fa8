#include "mvtk/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace mvtk {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Fourier::Fourier(int nx, double length) : nx_(nx), L_(length) {
  if (nx < 4 || nx % 2 != 0)
    throw std::invalid_argument("Fourier: Nx must be >= 4 and even");
  real_buf_ = fftw_alloc_real(nx_);
  cplx_buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(nx_ / 2 + 1));
  plan_r2c_ = fftw_plan_dft_r2c_1d(
      nx_, real_buf_, reinterpret_cast<fftw_complex*>(cplx_buf_), FFTW_ESTIMATE);
  plan_c2r_ = fftw_plan_dft_c2r_1d(
      nx_, reinterpret_cast<fftw_complex*>(cplx_buf_), real_buf_, FFTW_ESTIMATE);
}

Fourier::~Fourier() {
  fftw_destroy_plan(plan_r2c_);
  fftw_destroy_plan(plan_c2r_);
  fftw_free(real_buf_);
  fftw_free(reinterpret_cast<fftw_complex*>(cplx_buf_));
}

void Fourier::ddx(const double* in, double* out, std::size_t inner) const {
  const int nh = nx_ / 2;
  for (std::size_t r = 0; r < inner; ++r) {
    for (int i = 0; i < nx_; ++i) real_buf_[i] = in[i * inner + r];
    fftw_execute(plan_r2c_);
    for (int m = 0; m <= nh; ++m) {
      const double k = kTwoPi * m / L_;
      const std::complex<double> c = cplx_buf_[m];
      cplx_buf_[m] = (m == nh) ? std::complex<double>(0.0, 0.0)
                               : std::complex<double>(-k * c.imag(), k * c.real());
    }
    fftw_execute(plan_c2r_);
    const double scale = 1.0 / nx_;
    for (int i = 0; i < nx_; ++i) out[i * inner + r] = real_buf_[i] * scale;
  }
}

std::vector<double> Fourier::ddx_field(const std::vector<double>& g) const {
  if (g.size() != static_cast<std::size_t>(nx_))
    throw std::invalid_argument("Fourier::ddx_field: size mismatch");
  std::vector<double> out(g.size());
  ddx(g.data(), out.data(), 1);
  return out;
}

std::vector<double> Fourier::ddx_phase(const std::vector<double>& f,
                                       const PhaseGrid& grid) const {
  validate_phase_shape(f, grid, "f");
  if (grid.Nx != nx_) throw std::invalid_argument("Fourier::ddx_phase: Nx mismatch");
  std::vector<double> out(f.size());
  ddx(f.data(), out.data(), grid.vcells());
  return out;
}

std::vector<double> Fourier::solve_efield(const std::vector<double>& rhs) const {
  if (rhs.size() != static_cast<std::size_t>(nx_))
    throw std::invalid_argument("Fourier::solve_efield: size mismatch");
  const int nh = nx_ / 2;
  for (int i = 0; i < nx_; ++i) real_buf_[i] = rhs[i];
  fftw_execute(plan_r2c_);
  cplx_buf_[0] = 0.0;  // zero-mean gauge: the 1D constant-field kernel is dropped
  for (int m = 1; m < nh; ++m) {
    const double k = kTwoPi * m / L_;
    const std::complex<double> c = cplx_buf_[m];
    // E_hat = rhs_hat / (i k)
    cplx_buf_[m] = std::complex<double>(c.imag() / k, -c.real() / k);
  }
  cplx_buf_[nh] = 0.0;  // Nyquist sits outside the range of the derivative
  fftw_execute(plan_c2r_);
  std::vector<double> out(nx_);
  const double scale = 1.0 / nx_;
  for (int i = 0; i < nx_; ++i) out[i] = real_buf_[i] * scale;
  return out;
}

std::vector<double> Fourier::solve_potential(const std::vector<double>& rhs) const {
  if (rhs.size() != static_cast<std::size_t>(nx_))
    throw std::invalid_argument("Fourier::solve_potential: size mismatch");
  const int nh = nx_ / 2;
  for (int i = 0; i < nx_; ++i) real_buf_[i] = rhs[i];
  fftw_execute(plan_r2c_);
  cplx_buf_[0] = 0.0;
  for (int m = 1; m < nh; ++m) {
    const double k = kTwoPi * m / L_;
    cplx_buf_[m] /= k * k;
  }
  cplx_buf_[nh] = 0.0;
  fftw_execute(plan_c2r_);
  std::vector<double> out(nx_);
  const double scale = 1.0 / nx_;
  for (int i = 0; i < nx_; ++i) out[i] = real_buf_[i] * scale;
  return out;
}

std::vector<std::complex<double>> Fourier::coefficients(const std::vector<double>& g) const {
  if (g.size() != static_cast<std::size_t>(nx_))
    throw std::invalid_argument("Fourier::coefficients: size mismatch");
  for (int i = 0; i < nx_; ++i) real_buf_[i] = g[i];
  fftw_execute(plan_r2c_);
  std::vector<std::complex<double>> out(nx_ / 2 + 1);
  for (int m = 0; m <= nx_ / 2; ++m) out[m] = cplx_buf_[m] / double(nx_);
  return out;
}

std::vector<double> Fourier::mode_energies(const std::vector<double>& g, int mmax) const {
  auto c = coefficients(g);
  std::vector<double> e(mmax, 0.0);
  for (int m = 1; m <= mmax && m < static_cast<int>(c.size()); ++m)
    e[m - 1] = L_ * std::norm(c[m]);
  return e;
}

namespace {

// 5-point one-sided / central rows, all 4th order accurate.
inline void ddv_line_n5(const double* f, double* out, int n, double h,
                        std::ptrdiff_t s) {
  const double c = 1.0 / (12.0 * h);
  out[0] = c * (-25.0 * f[0] + 48.0 * f[s] - 36.0 * f[2 * s] + 16.0 * f[3 * s] -
                3.0 * f[4 * s]);
  out[s] = c * (-3.0 * f[0] - 10.0 * f[s] + 18.0 * f[2 * s] - 6.0 * f[3 * s] + f[4 * s]);
  for (int j = 2; j < n - 2; ++j)
    out[j * s] = c * (f[(j - 2) * s] - 8.0 * f[(j - 1) * s] + 8.0 * f[(j + 1) * s] -
                      f[(j + 2) * s]);
  const std::ptrdiff_t e = (n - 1) * s;
  out[e - s] = -c * (-3.0 * f[e] - 10.0 * f[e - s] + 18.0 * f[e - 2 * s] -
                     6.0 * f[e - 3 * s] + f[e - 4 * s]);
  out[e] = -c * (-25.0 * f[e] + 48.0 * f[e - s] - 36.0 * f[e - 2 * s] +
                 16.0 * f[e - 3 * s] - 3.0 * f[e - 4 * s]);
}

// n == 4: derivative of the cubic interpolant (exact for cubics).
inline void ddv_line_n4(const double* f, double* out, double h, std::ptrdiff_t s) {
  const double c = 1.0 / (6.0 * h);
  out[0] = c * (-11.0 * f[0] + 18.0 * f[s] - 9.0 * f[2 * s] + 2.0 * f[3 * s]);
  out[s] = c * (-2.0 * f[0] - 3.0 * f[s] + 6.0 * f[2 * s] - f[3 * s]);
  out[2 * s] = c * (f[0] - 6.0 * f[s] + 3.0 * f[2 * s] + 2.0 * f[3 * s]);
  out[3 * s] = c * (-2.0 * f[0] + 9.0 * f[s] - 18.0 * f[2 * s] + 11.0 * f[3 * s]);
}

struct StencilRow {
  int col[5];
  double coef[5];
  int len;
};

// Row j of the derivative matrix, coefficients without the 1/(12h) factor.
inline StencilRow stencil_row(int j, int n) {
  StencilRow r{};
  if (n == 4) {
    static const double rows[4][4] = {{-22.0, 36.0, -18.0, 4.0},
                                      {-4.0, -6.0, 12.0, -2.0},
                                      {2.0, -12.0, 6.0, 4.0},
                                      {-4.0, 18.0, -36.0, 22.0}};
    r.len = 4;
    for (int i = 0; i < 4; ++i) {
      r.col[i] = i;
      r.coef[i] = rows[j][i];  // scaled so that /(12h) applies uniformly
    }
    return r;
  }
  if (j == 0) {
    r = {{0, 1, 2, 3, 4}, {-25.0, 48.0, -36.0, 16.0, -3.0}, 5};
  } else if (j == 1) {
    r = {{0, 1, 2, 3, 4}, {-3.0, -10.0, 18.0, -6.0, 1.0}, 5};
  } else if (j == n - 2) {
    r = {{n - 5, n - 4, n - 3, n - 2, n - 1}, {-1.0, 6.0, -18.0, 10.0, 3.0}, 5};
  } else if (j == n - 1) {
    r = {{n - 5, n - 4, n - 3, n - 2, n - 1}, {3.0, -16.0, 36.0, -48.0, 25.0}, 5};
  } else {
    r = {{j - 2, j - 1, j + 1, j + 2, 0}, {1.0, -8.0, 8.0, -1.0, 0.0}, 4};
  }
  return r;
}

}  // namespace

void ddv_line(const double* f, double* out, int n, double h, std::ptrdiff_t stride) {
  if (n == 4) {
    ddv_line_n4(f, out, h, stride);
    return;
  }
  ddv_line_n5(f, out, n, h, stride);
}

void ddv_transpose_line(const double* f, double* out, int n, double h,
                        std::ptrdiff_t stride) {
  const double c = 1.0 / (12.0 * h);
  for (int j = 0; j < n; ++j) out[j * stride] = 0.0;
  for (int i = 0; i < n; ++i) {
    const StencilRow r = stencil_row(i, n);
    const double fi = f[i * stride];
    for (int t = 0; t < r.len; ++t) out[r.col[t] * stride] += c * r.coef[t] * fi;
  }
}

namespace {

template <class Op>
void for_each_vline1(const std::vector<double>& f, std::vector<double>& out,
                     const PhaseGrid& grid, Op&& op) {
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const std::size_t base = grid.idx(ix, 0);
      op(f.data() + base, out.data() + base, grid.Nv, std::ptrdiff_t(1));
    }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j2 = 0; j2 < grid.Nv; ++j2) {
        const std::size_t base = grid.idx(ix, 0, j2);
        op(f.data() + base, out.data() + base, grid.Nv, std::ptrdiff_t(grid.Nv));
      }
  }
}

template <class Op>
void for_each_vline2(const std::vector<double>& f, std::vector<double>& out,
                     const PhaseGrid& grid, Op&& op) {
  for (int ix = 0; ix < grid.Nx; ++ix)
    for (int j1 = 0; j1 < grid.Nv; ++j1) {
      const std::size_t base = grid.idx(ix, j1, 0);
      op(f.data() + base, out.data() + base, grid.Nv, std::ptrdiff_t(1));
    }
}

void adjoint_line(const double* f, double* out, int n, double h,
                  std::ptrdiff_t stride, const std::vector<double>& w) {
  // (1/w) D^T (w f): multiply by the trapezoid weights, apply D^T, divide.
  static thread_local std::vector<double> tmp;
  tmp.resize(n);
  for (int j = 0; j < n; ++j) tmp[j] = w[j] * f[j * stride];
  static thread_local std::vector<double> res;
  res.resize(n);
  ddv_transpose_line(tmp.data(), res.data(), n, h, 1);
  for (int j = 0; j < n; ++j) out[j * stride] = res[j] / w[j];
}

}  // namespace

std::vector<double> ddv1_phase(const std::vector<double>& f, const PhaseGrid& grid) {
  validate_phase_shape(f, grid, "f");
  std::vector<double> out(f.size());
  for_each_vline1(f, out, grid, [&](const double* in, double* o, int n, std::ptrdiff_t s) {
    ddv_line(in, o, n, grid.dv(), s);
  });
  return out;
}

std::vector<double> ddv2_phase(const std::vector<double>& f, const PhaseGrid& grid) {
  if (grid.config != GridConfig::EM_1D2V)
    throw std::invalid_argument("ddv2_phase: needs EM_1D2V");
  validate_phase_shape(f, grid, "f");
  std::vector<double> out(f.size());
  for_each_vline2(f, out, grid, [&](const double* in, double* o, int n, std::ptrdiff_t s) {
    ddv_line(in, o, n, grid.dv(), s);
  });
  return out;
}

std::vector<double> ddv1_adjoint_phase(const std::vector<double>& f, const PhaseGrid& grid) {
  validate_phase_shape(f, grid, "f");
  const std::vector<double> w = grid.velocity_weights();
  std::vector<double> out(f.size());
  for_each_vline1(f, out, grid, [&](const double* in, double* o, int n, std::ptrdiff_t s) {
    adjoint_line(in, o, n, grid.dv(), s, w);
  });
  return out;
}

std::vector<double> ddv2_adjoint_phase(const std::vector<double>& f, const PhaseGrid& grid) {
  if (grid.config != GridConfig::EM_1D2V)
    throw std::invalid_argument("ddv2_adjoint_phase: needs EM_1D2V");
  validate_phase_shape(f, grid, "f");
  const std::vector<double> w = grid.velocity_weights();
  std::vector<double> out(f.size());
  for_each_vline2(f, out, grid, [&](const double* in, double* o, int n, std::ptrdiff_t s) {
    adjoint_line(in, o, n, grid.dv(), s, w);
  });
  return out;
}

}  // namespace mvtk
