#include "mvtk/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvtk {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  LineFit f;
  if (std::abs(den) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                        double t_min, double t_max) {
  DecayFit out;
  std::vector<double> tp, lp;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.0) {
      tp.push_back(t[i]);
      lp.push_back(std::log(y[i]));
    }
  }
  out.peaks_used = static_cast<int>(tp.size());
  if (tp.size() < 3) return out;
  const LineFit f = fit_line(tp, lp);
  out.rate = f.slope;
  double spacing = 0.0;
  for (std::size_t i = 1; i < tp.size(); ++i) spacing += tp[i] - tp[i - 1];
  spacing /= (tp.size() - 1);
  out.frequency = spacing > 0.0 ? M_PI / spacing : 0.0;
  out.ok = true;
  return out;
}

GrowthFit fit_growth_rate(const std::vector<double>& t, const std::vector<double>& y,
                          double lo_frac, double hi_frac) {
  GrowthFit out;
  if (y.size() < 8) return out;
  const std::size_t imax = std::distance(y.begin(), std::max_element(y.begin(), y.end()));
  const double ymax = y[imax];
  if (!(ymax > 0.0)) return out;
  // keep the window well above the launch level: before the signal has grown
  // by ~2 decades the decaying/ballistic components still pollute the slope
  double y_early = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(6, y.size()); ++i)
    y_early = std::max(y_early, y[i]);
  const double lo = std::max(lo_frac * ymax, 100.0 * y_early);
  std::vector<double> tw, lw;
  for (std::size_t i = 0; i <= imax; ++i) {
    if (y[i] > lo && y[i] < hi_frac * ymax) {
      tw.push_back(t[i]);
      lw.push_back(std::log(y[i]));
    }
  }
  if (tw.size() < 6) return out;
  const LineFit f = fit_line(tw, lw);
  out.rate = f.slope;
  out.window_t0 = tw.front();
  out.window_t1 = tw.back();
  out.points_used = static_cast<int>(tw.size());
  out.ok = true;
  return out;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& e,
                 double floor) {
  std::vector<double> lh, le;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (e[i] > floor) {
      lh.push_back(std::log(h[i]));
      le.push_back(std::log(e[i]));
    }
  }
  if (lh.size() < 2) return std::numeric_limits<double>::infinity();
  return fit_line(lh, le).slope;
}

}  // namespace mvtk
