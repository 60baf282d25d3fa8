#include "mvtk/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace mvtk {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <class T>
T gauss_value(const GaussianComponent& c, T v) {
  const T xi = (v - c.mean) / c.sigma;
  return (c.density * kInvSqrt2Pi / c.sigma) * std::exp(-0.5 * xi * xi);
}

template <class T>
T gauss_derivative(const GaussianComponent& c, T v) {
  const T xi = (v - c.mean) / c.sigma;
  return -xi / c.sigma * gauss_value(c, v);
}
}  // namespace

double AnalyticVelocityProfile::value(double v) const {
  double s = 0.0;
  for (const auto& c : components) s += gauss_value(c, v);
  return s;
}

double AnalyticVelocityProfile::derivative(double v) const {
  double s = 0.0;
  for (const auto& c : components) s += gauss_derivative(c, v);
  return s;
}

std::complex<double> AnalyticVelocityProfile::value(std::complex<double> v) const {
  std::complex<double> s = 0.0;
  for (const auto& c : components) s += gauss_value(c, v);
  return s;
}

std::complex<double> AnalyticVelocityProfile::derivative(std::complex<double> v) const {
  std::complex<double> s = 0.0;
  for (const auto& c : components) s += gauss_derivative(c, v);
  return s;
}

double AnalyticVelocityProfile::total_density() const {
  double s = 0.0;
  for (const auto& c : components) s += c.density;
  return s;
}

double AnalyticVelocityProfile::suggested_vmax() const {
  double m = 0.0;
  for (const auto& c : components)
    m = std::max(m, std::abs(c.mean) + 6.0 * c.sigma);
  return m;
}

AnalyticVelocityProfile AnalyticVelocityProfile::maxwellian(double sigma, double u,
                                                            double density) {
  return {{GaussianComponent{density, u, sigma}}};
}

AnalyticVelocityProfile AnalyticVelocityProfile::two_stream(double u0, double sigma) {
  return {{GaussianComponent{0.5, u0, sigma}, GaussianComponent{0.5, -u0, sigma}}};
}

AnalyticVelocityProfile AnalyticVelocityProfile::bump_on_tail(double n_bump, double u_bump,
                                                              double sigma_bump,
                                                              double sigma_core) {
  return {{GaussianComponent{1.0 - n_bump, 0.0, sigma_core},
           GaussianComponent{n_bump, u_bump, sigma_bump}}};
}

}  // namespace mvtk
