#pragma once

#include "wplab/grid.hpp"
#include "wplab/potential.hpp"
#include "wplab/types.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace wplab {

class TrajectoryRecord;

/// Discrete scalar (1 component) or two-level (2 components) wavefunction on a
/// periodic grid. Storage is component-contiguous; within a component the flat
/// index is row-major with axis 0 slowest.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(GridSpec grid, int components);

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t points() const { return points_; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> component(int c) { return {values_.data() + c * points_, points_}; }
  std::span<const cplx> component(int c) const { return {values_.data() + c * points_, points_}; }

  cplx& at(int c, std::size_t i) { return values_[c * points_ + i]; }
  cplx at(int c, std::size_t i) const { return values_[c * points_ + i]; }

  bool all_finite() const;
  void set_zero();

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);

 private:
  void require_same_shape(const ComplexField& o) const;

  GridSpec grid_{};
  int components_ = 0;
  std::size_t points_ = 0;
  std::vector<cplx> values_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);

/// Scalar field sampled from a function of position.
ComplexField sample_field(const GridSpec& grid, const std::function<cplx(const Point&)>& f);

// --- Norms -----------------------------------------------------------------

/// Squared L2 norm summed over components.
double mass(const ComplexField& f);
double l2_norm(const ComplexField& f);
/// L2 inner product <a, b> = sum_c int conj(a_c) b_c.
cplx inner(const ComplexField& a, const ComplexField& b);
/// (sum_{|alpha| <= order} ||eps^{|alpha|} d^alpha f||^2)^{1/2}, order in {0, 1, 2},
/// with spectral derivatives; summed over components.
double h_eps_norm(const ComplexField& f, double eps, int order);
/// Quadrature L^q norm for q in {2, 4} or q = infinity (max modulus).
double lebesgue_norm(const ComplexField& f, double q);
/// d^order f / dx_axis^order via FFT. Odd orders drop the Nyquist mode.
ComplexField spectral_derivative(const ComplexField& f, int axis, int order);
/// Fraction of mass within `cells` grid cells of any box face.
double boundary_mass_fraction(const ComplexField& f, std::size_t cells);

// --- Wave packets ----------------------------------------------------------

enum class EnvelopeKind { gaussian, hermite1 };

/// Unit-L2 Schwartz profile a(y).
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::gaussian;
  double width = 1.0;

  /// gaussian: (pi w^2)^{-d/4} exp(-|y|^2 / (2 w^2));
  /// hermite1: sqrt(2) (y_0 / w) times the gaussian.
  double operator()(const Point& y) const;
};

struct PacketParams {
  Point x0;
  Point xi0;
  Envelope envelope{};
  Mode mode = Mode::plus;
  cplx amplitude{1.0, 0.0};
};

/// amplitude * envelope sampled on the profile (y) grid.
ComplexField sample_profile_data(const PacketParams& params, const GridSpec& ygrid);

/// eps^{-d/4} e^{i xi0.(x-x0)/eps} a((x-x0)/sqrt(eps)) on the x-grid.
/// Throws ResolutionError or BoundaryError when the grid cannot carry the packet.
ComplexField build_wavepacket(const PacketParams& params, double eps, const GridSpec& grid);

/// Phase-space centre and action used to place a profile on the x-grid.
struct AnsatzCenter {
  Point x;
  Point xi;
  double action = 0.0;
};

/// Places a profile u(y) on the x-grid as
///   eps^{-d/4} u((x - x_c)/sqrt(eps)) e^{i(S + xi.(x - x_c))/eps}
/// using tensor-product trigonometric interpolation of u. Holds scratch buffers;
/// one builder per thread.
class AnsatzBuilder {
 public:
  AnsatzBuilder(GridSpec ygrid, GridSpec xgrid, double eps);

  /// Throws InterpolationError if the scaled y-box does not fit in the x-box.
  void build(const ComplexField& u, const AnsatzCenter& center, ComplexField& out);
  ComplexField build(const ComplexField& u, const AnsatzCenter& center);

  const GridSpec& ygrid() const { return ygrid_; }
  const GridSpec& xgrid() const { return xgrid_; }
  double eps() const { return eps_; }

 private:
  GridSpec ygrid_;
  GridSpec xgrid_;
  double eps_;
};

/// Throws InterpolationError if u carries more than `tolerance` of its mass in the
/// top quarter of the y-grid frequencies (trigonometric interpolation unreliable).
void check_profile_resolved(const ComplexField& u, double tolerance = 1e-16);

/// phi^eps(t, .) from a profile snapshot u(t, .) and the classical record.
ComplexField build_ansatz(const ComplexField& u, const TrajectoryRecord& record, double eps, double t,
                          const GridSpec& xgrid);

// --- Polarization ----------------------------------------------------------

/// chi_plus and chi_minus at every grid node in the half-angle gauge, with the
/// angle unwrapped continuously across neighbouring nodes.
class EigenFrame {
 public:
  EigenFrame(const MatrixPotentialModel& model, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  /// chi_plus = (c, s), chi_minus = (-s, c)
  double cos_half(std::size_t i) const { return cos_half_[i]; }
  double sin_half(std::size_t i) const { return sin_half_[i]; }
  double alpha(std::size_t i) const { return alpha_[i]; }
  Eigen::Vector2d chi(Mode m, std::size_t i) const;

 private:
  GridSpec grid_;
  std::vector<double> cos_half_;
  std::vector<double> sin_half_;
  std::vector<double> alpha_;
};

ComplexField polarize(const ComplexField& scalar, const EigenFrame& frame, Mode m);
ComplexField polarize(const ComplexField& scalar, const MatrixPotentialModel& model, Mode m);
/// Adds scalar * chi_mode into an existing two-component field.
void add_polarized(ComplexField& field2, const ComplexField& scalar, const EigenFrame& frame, Mode m,
                   cplx weight = 1.0);
/// Pointwise <field2(x), chi_mode(x)>.
ComplexField mode_project(const ComplexField& field2, const EigenFrame& frame, Mode m);
ComplexField mode_project(const ComplexField& field2, const MatrixPotentialModel& model, Mode m);

// --- Snapshot files --------------------------------------------------------

struct FieldSnapshot {
  ComplexField field;
  double eps = 0.0;
  double t = 0.0;
};

/// Binary layout, all little-endian: "WPLB1", u64 d, u64 components, u64 N_i (d values),
/// f64 L_i (d values), f64 eps, f64 t, then (re, im) f64 pairs in storage order.
void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double eps,
                    double t);
FieldSnapshot read_snapshot(const std::filesystem::path& path);

}  // namespace wplab
