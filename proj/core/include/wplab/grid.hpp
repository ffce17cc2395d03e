#pragma once

#include "wplab/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace wplab {

/// Uniform periodic box [-L_i, L_i) per axis with N_i nodes (a power of two, N_i >= 16).
struct GridSpec {
  int dim = 1;
  std::array<double, kMaxDim> half_width{1.0, 1.0, 1.0};
  std::array<std::size_t, kMaxDim> points{16, 16, 16};

  static GridSpec uniform(int dim, double half_width, std::size_t points);

  /// Throws ConfigError if the invariants do not hold.
  void validate() const;

  std::size_t size() const;
  double spacing(int axis) const { return 2.0 * half_width[axis] / double(points[axis]); }
  double cell_volume() const;
  double node(int axis, std::size_t j) const { return -half_width[axis] + double(j) * spacing(axis); }
  /// Coordinates of the flat (row-major, axis 0 slowest) index.
  Point position(std::size_t flat) const;
  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const;
  /// Angular wavenumbers of the FFT output ordering along one axis.
  std::vector<double> wavenumbers(int axis) const;
  /// Largest spacing over the axes.
  double max_spacing() const;

  bool operator==(const GridSpec& other) const;
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Largest spacing resolving both the packet width sqrt(eps) and the phase scale
/// eps / |xi|: min(sqrt(eps)/4, eps/(4|xi|+1)).
double max_resolved_spacing(double eps, double xi_max);

/// Throws ResolutionError naming the violated inequality.
void check_resolution(const GridSpec& grid, double eps, double xi_max);

}  // namespace wplab
