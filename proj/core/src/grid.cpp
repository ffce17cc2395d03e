#include "wplab/grid.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wplab {

GridSpec GridSpec::uniform(int dim, double half_width, std::size_t points) {
  GridSpec g;
  g.dim = dim;
  for (int i = 0; i < kMaxDim; ++i) {
    g.half_width[i] = i < dim ? half_width : 1.0;
    g.points[i] = i < dim ? points : 1;
  }
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("grid dimension must be 1, 2 or 3");
  for (int i = 0; i < dim; ++i) {
    if (!(half_width[i] > 0.0)) throw ConfigError("grid half-width must be positive");
    if (points[i] < 16 || !is_power_of_two(points[i]))
      throw ConfigError("grid point count must be a power of two >= 16, got " +
                        std::to_string(points[i]));
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= points[i];
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= spacing(i);
  return v;
}

std::array<std::size_t, kMaxDim> GridSpec::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxDim> idx{0, 0, 0};
  for (int i = dim - 1; i >= 0; --i) {
    idx[i] = flat % points[i];
    flat /= points[i];
  }
  return idx;
}

Point GridSpec::position(std::size_t flat) const {
  const auto idx = unflatten(flat);
  Point x(dim);
  for (int i = 0; i < dim; ++i) x(i) = node(i, idx[i]);
  return x;
}

std::vector<double> GridSpec::wavenumbers(int axis) const {
  const std::size_t n = points[axis];
  const double base = std::numbers::pi / half_width[axis];
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = j < n / 2 ? double(j) : double(j) - double(n);
    k[j] = base * m;
  }
  return k;
}

double GridSpec::max_spacing() const {
  double h = 0.0;
  for (int i = 0; i < dim; ++i) h = std::max(h, spacing(i));
  return h;
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (dim != o.dim) return false;
  for (int i = 0; i < dim; ++i)
    if (half_width[i] != o.half_width[i] || points[i] != o.points[i]) return false;
  return true;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double max_resolved_spacing(double eps, double xi_max) {
  return std::min(std::sqrt(eps) / 4.0, eps / (4.0 * xi_max + 1.0));
}

void check_resolution(const GridSpec& grid, double eps, double xi_max) {
  for (int i = 0; i < grid.dim; ++i) {
    const double h = grid.spacing(i);
    if (std::sqrt(eps) < 4.0 * h) {
      std::ostringstream os;
      os << "packet width unresolved: sqrt(eps) = " << std::sqrt(eps) << " < 4*dx = " << 4.0 * h
         << " on axis " << i;
      throw ResolutionError(os.str());
    }
    if (h > eps / (4.0 * xi_max + 1.0)) {
      std::ostringstream os;
      os << "phase unresolved: dx = " << h << " > eps/(4|xi|+1) = " << eps / (4.0 * xi_max + 1.0)
         << " on axis " << i;
      throw ResolutionError(os.str());
    }
  }
}

}  // namespace wplab
