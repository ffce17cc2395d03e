#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string_view>

namespace wplab {

using cplx = std::complex<double>;

// Spatial dimension never exceeds 3; fixed max sizes keep these off the heap.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using SymMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using FrameDerivative = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 3, 2>;

inline constexpr int kMaxDim = 3;

enum class Mode { plus, minus };

constexpr Mode other(Mode m) { return m == Mode::plus ? Mode::minus : Mode::plus; }
constexpr double sign(Mode m) { return m == Mode::plus ? 1.0 : -1.0; }
constexpr std::string_view to_string(Mode m) { return m == Mode::plus ? "plus" : "minus"; }

inline Point zero_point(int dim) { return Point::Zero(dim); }

// <x> = (1 + |x|^2)^{1/2}
inline double japanese_bracket(const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); }

}  // namespace wplab
