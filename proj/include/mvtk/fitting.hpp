#ifndef MVTK_FITTING_HPP
#define MVTK_FITTING_HPP

#include <vector>

namespace mvtk {

struct DecayFit {
  double rate = 0.0;       // d ln y / dt fitted through the oscillation peaks
  double frequency = 0.0;  // pi / mean peak spacing
  int peaks_used = 0;
  bool ok = false;
};

// Exponential envelope rate of an oscillating, decaying signal (e.g. mode
// field energy under Landau damping).  Fits a line through ln y at the local
// maxima inside [t_min, t_max].
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                        double t_min, double t_max);

struct GrowthFit {
  double rate = 0.0;  // d ln y / dt over the exponential window
  double window_t0 = 0.0, window_t1 = 0.0;
  int points_used = 0;
  bool ok = false;
};

// Exponential growth rate fitted over the window where y rises between the
// given fractions of its eventual maximum, additionally floored two decades
// above the launch level so the transient cannot leak into the slope.
GrowthFit fit_growth_rate(const std::vector<double>& t, const std::vector<double>& y,
                          double lo_frac = 1e-5, double hi_frac = 0.2);

// Least-squares slope of ln(e) versus ln(h); residuals below `floor` make the
// order undefined (returned as +inf: better than any finite requirement).
double fit_order(const std::vector<double>& h, const std::vector<double>& e,
                 double floor = 1e-14);

}  // namespace mvtk

#endif
