#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gluenn/common.hpp"

namespace gluenn {

// Central-difference check of an analytic gradient. Returns the maximum
// over coordinates of |fd_i - analytic_i| / (|analytic_i| + 1e-12).
inline double finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& analytic,
                                std::vector<double> point, double h) {
  if (!(h > 0.0)) throw Error("finite_diff_check: h must be positive");
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double fp = f(point);
    point[i] = saved - h;
    const double fm = f(point);
    point[i] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(fd - analytic[i]) / (std::abs(analytic[i]) + 1e-12);
    if (err > worst) worst = err;
  }
  return worst;
}

// Same, for a single scalar input.
inline double finite_diff_check1(const std::function<double(double)>& f, double analytic,
                                 double x, double h) {
  if (!(h > 0.0)) throw Error("finite_diff_check: h must be positive");
  const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
  return std::abs(fd - analytic) / (std::abs(analytic) + 1e-12);
}

}  // namespace gluenn
