#ifndef MVTK_PROFILES_HPP
#define MVTK_PROFILES_HPP

#include <complex>
#include <vector>

namespace mvtk {

// Sum-of-Gaussians velocity profile sum_c n_c N(u_c, sigma_c); entire in v,
// so the dispersion oracle can evaluate it on the complex plane.
struct GaussianComponent {
  double density = 1.0;
  double mean = 0.0;
  double sigma = 1.0;
};

struct AnalyticVelocityProfile {
  std::vector<GaussianComponent> components;

  double value(double v) const;
  double derivative(double v) const;
  std::complex<double> value(std::complex<double> v) const;
  std::complex<double> derivative(std::complex<double> v) const;

  double total_density() const;
  // largest |u| + 6 sigma over components: the natural velocity cutoff
  double suggested_vmax() const;

  static AnalyticVelocityProfile maxwellian(double sigma = 1.0, double u = 0.0,
                                            double density = 1.0);
  static AnalyticVelocityProfile two_stream(double u0, double sigma = 1.0);
  static AnalyticVelocityProfile bump_on_tail(double n_bump, double u_bump,
                                              double sigma_bump, double sigma_core = 1.0);
};

}  // namespace mvtk

#endif
