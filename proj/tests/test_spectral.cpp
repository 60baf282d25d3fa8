#include "doctest.h"

#include <cmath>

#include "mvtk/spectral.hpp"
#include "test_support.hpp"

using namespace mvtk;

namespace {
constexpr double kTwoPiTest = 6.283185307179586476925286766559;
}

TEST_CASE("spectral x-derivative is exact on band-limited fields") {
  const int nx = 32;
  const double L = 4 * M_PI;
  Fourier fx(nx, L);
  std::vector<double> g(nx), expect(nx);
  const double k = 2.0 * M_PI * 3 / L;
  for (int i = 0; i < nx; ++i) {
    const double x = i * L / nx;
    g[i] = std::sin(k * x) + 0.5 * std::cos(2 * k * x);
    expect[i] = k * std::cos(k * x) - k * std::sin(2 * k * x);
  }
  const auto d = fx.ddx_field(g);
  for (int i = 0; i < nx; ++i) CHECK(d[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("spectral derivative is exactly skew under the uniform inner product") {
  const int nx = 64;
  Fourier fx(nx, 2 * M_PI);
  testsupport::Rng rng(5);
  std::vector<double> a(nx), b(nx);
  for (int i = 0; i < nx; ++i) {
    a[i] = rng.uni();
    b[i] = rng.uni();
  }
  const auto da = fx.ddx_field(a);
  const auto db = fx.ddx_field(b);
  double s = 0.0;
  for (int i = 0; i < nx; ++i) s += da[i] * b[i] + a[i] * db[i];
  CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("poisson solve closes the loop with ddx") {
  const int nx = 48;
  const double L = 10.0;
  Fourier fx(nx, L);
  testsupport::Rng rng(9);
  // band-limited source (the derivative has no Nyquist range)
  std::vector<double> rho(nx, 0.0);
  for (int m = 1; m <= 7; ++m) {
    const double a = rng.uni(), b = rng.uni();
    for (int i = 0; i < nx; ++i) {
      const double th = kTwoPiTest * m * i / nx;
      rho[i] += a * std::cos(th) + b * std::sin(th);
    }
  }
  const auto E = fx.solve_efield(rho);
  const auto dE = fx.ddx_field(E);
  double emean = 0.0;
  for (int i = 0; i < nx; ++i) {
    CHECK(dE[i] == doctest::Approx(rho[i]).epsilon(1e-10));
    emean += E[i];
  }
  CHECK(std::abs(emean / nx) < 1e-13);  // zero-mean gauge

  // a Nyquist-contaminated source stays finite and loses only that mode
  std::vector<double> noisy = rho;
  for (int i = 0; i < nx; ++i) noisy[i] += 0.5 * ((i % 2 == 0) ? 1.0 : -1.0);
  const auto En = fx.solve_efield(noisy);
  const auto dEn = fx.ddx_field(En);
  for (int i = 0; i < nx; ++i) CHECK(dEn[i] == doctest::Approx(rho[i]).epsilon(1e-10));
}

TEST_CASE("velocity stencil: 4th order and exact on cubics") {
  const int n = 33;
  const double h = 0.25;
  std::vector<double> f(n), out(n);
  for (int j = 0; j < n; ++j) {
    const double v = -4.0 + j * h;
    f[j] = 1.0 + v - 0.5 * v * v + 0.125 * v * v * v;
  }
  ddv_line(f.data(), out.data(), n, h, 1);
  for (int j = 0; j < n; ++j) {
    const double v = -4.0 + j * h;
    CHECK(out[j] == doctest::Approx(1.0 - v + 0.375 * v * v).epsilon(1e-12));
  }

  // observed order on exp(sin v); boundary closures carry larger constants,
  // so track the interior and the one-sided rows separately
  std::vector<double> eint, ebnd, hs;
  for (int nn : {65, 129, 257}) {
    const double hh = 8.0 / (nn - 1);
    std::vector<double> g(nn), d(nn);
    for (int j = 0; j < nn; ++j) {
      const double v = -4.0 + j * hh;
      g[j] = std::exp(std::sin(v));
    }
    ddv_line(g.data(), d.data(), nn, hh, 1);
    double ei = 0.0, eb = 0.0;
    for (int j = 0; j < nn; ++j) {
      const double v = -4.0 + j * hh;
      const double err = std::abs(d[j] - std::cos(v) * std::exp(std::sin(v)));
      if (j < 2 || j >= nn - 2)
        eb = std::max(eb, err);
      else
        ei = std::max(ei, err);
    }
    eint.push_back(ei);
    ebnd.push_back(eb);
    hs.push_back(hh);
  }
  CHECK(std::log(eint[0] / eint[2]) / std::log(hs[0] / hs[2]) > 3.7);
  CHECK(std::log(ebnd[0] / ebnd[2]) / std::log(hs[0] / hs[2]) > 3.2);
}

TEST_CASE("transpose stencil is the exact adjoint") {
  const int n = 41;
  const double h = 0.2;
  testsupport::Rng rng(13);
  std::vector<double> a(n), b(n), da(n), tb(n);
  for (int j = 0; j < n; ++j) {
    a[j] = rng.uni();
    b[j] = rng.uni();
  }
  ddv_line(a.data(), da.data(), n, h, 1);
  ddv_transpose_line(b.data(), tb.data(), n, h, 1);
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < n; ++j) {
    s1 += da[j] * b[j];
    s2 += a[j] * tb[j];
  }
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));
}

TEST_CASE("weighted adjoint pairs with ddv under the trapezoid product") {
  const PhaseGrid g = PhaseGrid::es_1d1v(2 * M_PI, 8, 5.0, 37);
  testsupport::Rng rng(17);
  const auto a = testsupport::random_phase(g, rng);
  const auto b = testsupport::random_phase(g, rng);
  const auto da = ddv1_phase(a, g);
  const auto ab = ddv1_adjoint_phase(b, g);
  // <D a, b>_w = <a, D' b>_w exactly
  CHECK(phase_inner(da, b, g) == doctest::Approx(phase_inner(a, ab, g)).epsilon(1e-12));
}

TEST_CASE("minimum grid Nv = 4 differentiates cubics exactly") {
  const int n = 4;
  const double h = 1.0;
  std::vector<double> f(n), out(n);
  for (int j = 0; j < n; ++j) {
    const double v = j * h;
    f[j] = 2.0 - v + 0.25 * v * v * v;
  }
  ddv_line(f.data(), out.data(), n, h, 1);
  for (int j = 0; j < n; ++j) {
    const double v = j * h;
    CHECK(out[j] == doctest::Approx(-1.0 + 0.75 * v * v).epsilon(1e-12));
  }
}

TEST_CASE("mode energies pick out single harmonics") {
  const int nx = 32;
  const double L = 4 * M_PI;
  Fourier fx(nx, L);
  std::vector<double> g(nx);
  const double amp = 0.3;
  for (int i = 0; i < nx; ++i) g[i] = amp * std::cos(2.0 * 2.0 * M_PI * i / nx);
  const auto em = fx.mode_energies(g, 4);
  CHECK(em[1] == doctest::Approx(L * amp * amp / 4.0).epsilon(1e-12));
  CHECK(std::abs(em[0]) < 1e-15);
  CHECK(std::abs(em[2]) < 1e-15);
}
