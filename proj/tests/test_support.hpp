#ifndef MVTK_TEST_SUPPORT_HPP
#define MVTK_TEST_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mvtk/grid.hpp"

namespace testsupport {

// Independent high-resolution quadrature oracle (adaptive Simpson on a real
// integrand); deliberately not the trapezoid rule the library uses.
inline double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-13, int depth = 48) {
  struct Rec {
    const std::function<double(double)>& f;
    double operator()(double a, double b, double fa, double fm, double fb, double whole,
                      double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
      return (*this)(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             (*this)(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } rec{f};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

// deterministic smooth random fields for property tests
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uni(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
};

inline std::vector<double> random_spatial(const mvtk::PhaseGrid& grid, Rng& rng,
                                          int mmax = 3) {
  std::vector<double> g(grid.Nx, 0.0);
  for (int m = 0; m <= mmax; ++m) {
    const double a = rng.uni(), b = rng.uni();
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double th = 2.0 * M_PI * m * grid.x(ix) / grid.L;
      g[ix] += a * std::cos(th) + (m ? b * std::sin(th) : 0.0);
    }
  }
  return g;
}

inline std::vector<double> random_phase(const mvtk::PhaseGrid& grid, Rng& rng) {
  std::vector<double> g(grid.phase_size(), 0.0);
  const double s = 0.45 * grid.v_max;
  for (int m = 0; m <= 2; ++m) {
    const double a = rng.uni(), b = rng.uni();
    const double c0 = rng.uni(), c1 = rng.uni(), c2 = rng.uni();
    for (int ix = 0; ix < grid.Nx; ++ix) {
      const double th = 2.0 * M_PI * m * grid.x(ix) / grid.L;
      const double sp = a * std::cos(th) + (m ? b * std::sin(th) : 0.0);
      if (grid.config == mvtk::GridConfig::ES_1D1V) {
        for (int j = 0; j < grid.Nv; ++j) {
          const double v = grid.v(j);
          g[grid.idx(ix, j)] +=
              sp * std::exp(-0.5 * v * v / (s * s)) * (c0 + c1 * v + c2 * v * v);
        }
      } else {
        for (int j1 = 0; j1 < grid.Nv; ++j1)
          for (int j2 = 0; j2 < grid.Nv; ++j2) {
            const double v1 = grid.v(j1), v2 = grid.v(j2);
            g[grid.idx(ix, j1, j2)] += sp *
                                       std::exp(-0.5 * (v1 * v1 + v2 * v2) / (s * s)) *
                                       (c0 + c1 * v1 + c2 * v2);
          }
      }
    }
  }
  return g;
}

inline mvtk::State random_state(const mvtk::PhaseGrid& grid, Rng& rng) {
  mvtk::State z = mvtk::State::zeros(grid);
  const double s = grid.v_max / 6.0;
  for (int ix = 0; ix < grid.Nx; ++ix) {
    if (grid.config == mvtk::GridConfig::ES_1D1V) {
      for (int j = 0; j < grid.Nv; ++j) {
        const double v = grid.v(j);
        z.f[grid.idx(ix, j)] = std::exp(-0.5 * v * v / (s * s)) / (s * std::sqrt(2 * M_PI));
      }
    } else {
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const double v1 = grid.v(j1), v2 = grid.v(j2);
          z.f[grid.idx(ix, j1, j2)] =
              std::exp(-0.5 * (v1 * v1 + v2 * v2) / (s * s)) / (2 * M_PI * s * s);
        }
    }
  }
  const auto pert = random_phase(grid, rng);
  for (std::size_t k = 0; k < z.f.size(); ++k) z.f[k] += 0.05 * pert[k];
  z.E1 = random_spatial(grid, rng);
  for (auto& x : z.E1) x *= 0.3;
  if (grid.config == mvtk::GridConfig::EM_1D2V) {
    z.E2 = random_spatial(grid, rng);
    z.B3 = random_spatial(grid, rng);
    for (auto& x : z.E2) x *= 0.3;
    for (auto& x : z.B3) x *= 0.3;
  }
  return z;
}

}  // namespace testsupport

#endif
