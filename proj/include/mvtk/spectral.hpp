#ifndef MVTK_SPECTRAL_HPP
#define MVTK_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "mvtk/grid.hpp"

struct fftw_plan_s;

namespace mvtk {

// Pseudospectral x-derivative, Poisson solves and mode diagnostics on the
// periodic spatial grid.  One instance per (Nx, L); instances own FFTW plans
// and scratch buffers, so share them per thread, not across threads.
class Fourier {
 public:
  Fourier(int nx, double length);
  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;

  int nx() const { return nx_; }
  double length() const { return L_; }

  // d/dx along the (slowest) x index; `inner` values per spatial point.
  // The Nyquist mode derivative is set to zero.
  void ddx(const double* in, double* out, std::size_t inner) const;
  std::vector<double> ddx_field(const std::vector<double>& g) const;
  std::vector<double> ddx_phase(const std::vector<double>& f, const PhaseGrid& grid) const;

  // Solve dE/dx = rhs with zero-mean E (rhs must have zero mean; its mean
  // mode is dropped).
  std::vector<double> solve_efield(const std::vector<double>& rhs) const;
  // Solve -phi'' = rhs with zero-mean phi.
  std::vector<double> solve_potential(const std::vector<double>& rhs) const;

  // |g_hat_m|^2 * L for m = 1..mmax (field energy carried by mode m).
  std::vector<double> mode_energies(const std::vector<double>& g, int mmax) const;

  // Forward coefficients g_hat_m = (1/Nx) sum g_i exp(-i k_m x_i), m=0..Nx/2.
  std::vector<std::complex<double>> coefficients(const std::vector<double>& g) const;

 private:
  int nx_;
  double L_;
  fftw_plan_s* plan_r2c_;
  fftw_plan_s* plan_c2r_;
  double* real_buf_;
  std::complex<double>* cplx_buf_;
};

// Fourth-order finite differences in v with one-sided closures at the
// velocity cutoff.  For n == 4 the full 4-node (cubic-exact) stencil is used.
void ddv_line(const double* f, double* out, int n, double h, std::ptrdiff_t stride);

// Plain transpose of the stencil matrix (same layout conventions).
void ddv_transpose_line(const double* f, double* out, int n, double h,
                        std::ptrdiff_t stride);

// Derivative along the only velocity axis (ES) or axis 1/2 (EM).
std::vector<double> ddv1_phase(const std::vector<double>& f, const PhaseGrid& grid);
std::vector<double> ddv2_phase(const std::vector<double>& f, const PhaseGrid& grid);

// Weighted adjoint (1/w) D^T (w .), the discrete dual of -d/dv under the
// trapezoid inner product; exact integration-by-parts partner of ddv.
std::vector<double> ddv1_adjoint_phase(const std::vector<double>& f, const PhaseGrid& grid);
std::vector<double> ddv2_adjoint_phase(const std::vector<double>& f, const PhaseGrid& grid);

}  // namespace mvtk

#endif
