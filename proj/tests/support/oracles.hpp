#pragma once

// Independent reference computations used by the test suites. Nothing here calls into
// the library's numerical kernels.

#include "wplab/types.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using wplab::cplx;
using wplab::Point;
using wplab::SymMat;

inline constexpr double pi = std::numbers::pi;

/// Central difference gradient with step h.
inline Point fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double h) {
  Point g(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    Point xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    g(a) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Central difference Jacobian of a vector-valued gradient: row a = d grad / d x_a.
inline SymMat fd_jacobian(const std::function<Point(const Point&)>& g, const Point& x, double h) {
  const auto d = x.size();
  SymMat J(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    Point xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    J.row(a) = ((g(xp) - g(xm)) / (2.0 * h)).transpose();
  }
  return J;
}

/// Second central differences of a scalar function.
inline SymMat fd_hessian(const std::function<double(const Point&)>& f, const Point& x, double h) {
  const auto d = x.size();
  SymMat H(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      auto shifted = [&](double sa, double sb) {
        Point y = x;
        y(a) += sa * h;
        y(b) += sb * h;
        return f(y);
      };
      H(a, b) = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Free Schroedinger evolution of pi^{-d/4} e^{-|y|^2/2} under i u_t = -Lap u / 2.
inline cplx free_gaussian(const Point& y, double t, int dim) {
  const cplx s(1.0, t);
  return std::pow(pi, -0.25 * dim) * std::pow(s, -0.5 * dim) * std::exp(-y.squaredNorm() / (2.0 * s));
}

/// Exact solution of i eps psi_t = -(eps^2/2) Lap psi + lambda psi for the packet
/// eps^{-d/4} e^{i xi0.(x - x0)/eps} pi^{-d/4} e^{-|x - x0|^2/(2 eps)}.
inline cplx free_semiclassical_packet(const Point& x, const Point& x0, const Point& xi0, double lambda, double eps,
                                      double t) {
  const int d = static_cast<int>(x.size());
  const Point xt = x0 + xi0 * t;
  const double S = 0.5 * xi0.squaredNorm() * t - lambda * t;
  const Point y = (x - xt) / std::sqrt(eps);
  return std::pow(eps, -0.25 * d) * free_gaussian(y, t, d) *
         std::exp(cplx(0.0, (S + xi0.dot(x - xt)) / eps));
}

/// O(N^2) discrete Fourier transform (sign -1 forward, no normalization).
inline std::vector<cplx> naive_dft(const std::vector<cplx>& v, int sign) {
  const std::size_t n = v.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += v[j] * std::polar(1.0, sign * 2.0 * pi * double(j * k % n) / double(n));
    out[k] = acc;
  }
  return out;
}

/// Uniform random points in [-r, r]^d from a fixed seed.
inline std::vector<Point> random_points(int dim, std::size_t n, double r, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Point x(dim);
    for (int a = 0; a < dim; ++a) x(a) = u(rng);
    out.push_back(x);
  }
  return out;
}

/// Slope of log2(err) against log2(h) by ordinary least squares.
inline double log2_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log2(h[k]);
    const double y = std::log2(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

}  // namespace oracle
