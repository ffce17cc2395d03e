#include "wplab/fit.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <vector>

namespace wplab {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw FitError("abscissa and ordinate lengths differ");
  const std::size_t n = x.size();
  if (n < 2) throw FitError("least squares needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissa in least squares");
  LinearFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / double(n));
  f.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

LinearFit order_fit(std::span<const double> eps, std::span<const double> value) {
  if (eps.size() != value.size()) throw FitError("eps and value lengths differ");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(value[i] > 0.0) || !std::isfinite(value[i]))
      throw FitError("order fit needs positive finite values");
    lx.push_back(std::log2(eps[i]));
    ly.push_back(std::log2(value[i]));
  }
  return least_squares(lx, ly);
}

}  // namespace wplab
