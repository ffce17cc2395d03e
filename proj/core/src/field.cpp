#include "wplab/field.hpp"

#include "wplab/classical.hpp"
#include "wplab/errors.hpp"
#include "wplab/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wplab {

ComplexField::ComplexField(GridSpec grid, int components)
    : grid_(grid), components_(components), points_(grid.size()) {
  grid_.validate();
  if (components != 1 && components != 2) throw ConfigError("field must have 1 or 2 components");
  values_.assign(points_ * static_cast<std::size_t>(components), cplx{});
}

bool ComplexField::all_finite() const {
  for (const cplx& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void ComplexField::set_zero() { std::fill(values_.begin(), values_.end(), cplx{}); }

void ComplexField::require_same_shape(const ComplexField& o) const {
  if (!(grid_ == o.grid_) || components_ != o.components_)
    throw ConfigError("field shape mismatch");
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (cplx& v : values_) v *= s;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

ComplexField sample_field(const GridSpec& grid, const std::function<cplx(const Point&)>& f) {
  ComplexField out(grid, 1);
  for (std::size_t i = 0; i < out.points(); ++i) out.at(0, i) = f(grid.position(i));
  return out;
}

// --- Norms -------------------------------------------------------------------

double mass(const ComplexField& f) {
  double s = 0.0;
  for (const cplx& v : f.values()) s += std::norm(v);
  return s * f.grid().cell_volume();
}

double l2_norm(const ComplexField& f) { return std::sqrt(mass(f)); }

cplx inner(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid()) || a.components() != b.components())
    throw ConfigError("inner product of mismatched fields");
  cplx s{};
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += std::conj(va[i]) * vb[i];
  return s * a.grid().cell_volume();
}

namespace {

// Per-axis wavenumbers: `even` keeps the Nyquist mode, `odd` zeroes it.
struct AxisWavenumbers {
  std::vector<double> even;
  std::vector<double> odd;
};

AxisWavenumbers axis_wavenumbers(const GridSpec& g, int axis) {
  AxisWavenumbers k{g.wavenumbers(axis), {}};
  k.odd = k.even;
  k.odd[g.points[axis] / 2] = 0.0;
  return k;
}

}  // namespace

double h_eps_norm(const ComplexField& f, double eps, int order) {
  if (order < 0 || order > 2) throw ConfigError("h_eps_norm order must be 0, 1 or 2");
  if (order == 0) return l2_norm(f);
  const GridSpec& g = f.grid();
  std::vector<AxisWavenumbers> k;
  for (int a = 0; a < g.dim; ++a) k.push_back(axis_wavenumbers(g, a));
  const double e2 = eps * eps;
  const double e4 = e2 * e2;

  ComplexField hat = f;
  Fft fft(g, f.components());
  fft.forward(hat.values());
  double total = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = hat.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const auto idx = g.unflatten(i);
      double w1 = 0.0;
      double w2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double ko = k[a].odd[idx[a]];
        const double ke = k[a].even[idx[a]];
        w1 += ko * ko;
        w2 += ke * ke * ke * ke;
        for (int b = a + 1; b < g.dim; ++b) {
          const double kb = k[b].odd[idx[b]];
          w2 += ko * ko * kb * kb;
        }
      }
      double w = 1.0 + e2 * w1;
      if (order == 2) w += e4 * w2;
      total += w * std::norm(comp[i]);
    }
  }
  return std::sqrt(total * g.cell_volume() / double(g.size()));
}

double lebesgue_norm(const ComplexField& f, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (q == 2.0) return l2_norm(f);
  if (q != 4.0) throw ConfigError("lebesgue_norm supports q = 2, 4 or infinity");
  // Pointwise |f|_{C^2}^2 first, so two-component fields use the Hermitian norm.
  double s = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    double a2 = 0.0;
    for (int c = 0; c < f.components(); ++c) a2 += std::norm(f.at(c, i));
    s += a2 * a2;
  }
  return std::pow(s * f.grid().cell_volume(), 0.25);
}

ComplexField spectral_derivative(const ComplexField& f, int axis, int order) {
  const GridSpec& g = f.grid();
  if (axis < 0 || axis >= g.dim) throw ConfigError("derivative axis out of range");
  if (order == 0) return f;
  const AxisWavenumbers k = axis_wavenumbers(g, axis);
  const auto& kk = order % 2 == 1 ? k.odd : k.even;
  ComplexField out = f;
  Fft fft(g, f.components());
  fft.forward(out.values());
  for (int c = 0; c < f.components(); ++c) {
    auto comp = out.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const auto idx = g.unflatten(i);
      comp[i] *= std::pow(cplx(0.0, kk[idx[axis]]), order);
    }
  }
  fft.backward(out.values());
  return out;
}

double boundary_mass_fraction(const ComplexField& f, std::size_t cells) {
  const GridSpec& g = f.grid();
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    double a2 = 0.0;
    for (int c = 0; c < f.components(); ++c) a2 += std::norm(f.at(c, i));
    total += a2;
    const auto idx = g.unflatten(i);
    for (int a = 0; a < g.dim; ++a) {
      if (idx[a] < cells || idx[a] >= g.points[a] - cells) {
        edge += a2;
        break;
      }
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

// --- Wave packets --------------------------------------------------------------

double Envelope::operator()(const Point& y) const {
  const int d = static_cast<int>(y.size());
  const double w2 = width * width;
  const double g = std::pow(std::numbers::pi * w2, -0.25 * d) * std::exp(-0.5 * y.squaredNorm() / w2);
  switch (kind) {
    case EnvelopeKind::gaussian:
      return g;
    case EnvelopeKind::hermite1:
      return std::sqrt(2.0) * (y(0) / width) * g;
  }
  return g;
}

ComplexField sample_profile_data(const PacketParams& params, const GridSpec& ygrid) {
  return sample_field(ygrid, [&](const Point& y) { return params.amplitude * params.envelope(y); });
}

ComplexField build_wavepacket(const PacketParams& params, double eps, const GridSpec& grid) {
  if (params.x0.size() != grid.dim || params.xi0.size() != grid.dim)
    throw ConfigError("packet dimension does not match the grid");
  check_resolution(grid, eps, params.xi0.norm());
  const double se = std::sqrt(eps);
  for (int a = 0; a < grid.dim; ++a) {
    const double room = grid.half_width[a] - std::abs(params.x0(a));
    if (room < 6.0 * se) {
      std::ostringstream os;
      os << "packet centre " << params.x0(a) << " is closer than 6 sqrt(eps) = " << 6.0 * se
         << " to the boundary on axis " << a;
      throw BoundaryError(os.str());
    }
  }
  const double scale = std::pow(eps, -0.25 * grid.dim);
  return sample_field(grid, [&](const Point& x) {
    const Point dx = x - params.x0;
    const double phase = params.xi0.dot(dx) / eps;
    return scale * params.amplitude * params.envelope(dx / se) * std::polar(1.0, phase);
  });
}

// --- Ansatz --------------------------------------------------------------------

AnsatzBuilder::AnsatzBuilder(GridSpec ygrid, GridSpec xgrid, double eps)
    : ygrid_(ygrid), xgrid_(xgrid), eps_(eps) {
  ygrid_.validate();
  xgrid_.validate();
  if (ygrid_.dim != xgrid_.dim) throw ConfigError("profile and x grids differ in dimension");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
}

namespace {

// Periodic band-limited interpolation kernel for an even number of nodes n over period p.
double dirichlet_kernel(double s, std::size_t n, double period) {
  const double arg = std::numbers::pi * s / period;
  const double t = std::tan(arg);
  if (std::abs(t) < 1e-13) return 1.0;
  return std::sin(double(n) * arg) / (double(n) * t);
}

struct AxisWindow {
  std::size_t first = 0;  // first x index inside the scaled y-box
  std::size_t count = 0;
  Eigen::MatrixXd kernel;  // count x N_y
  Eigen::VectorXcd phase;  // e^{i xi (x - x_c) / eps} over the window
};

}  // namespace

void AnsatzBuilder::build(const ComplexField& u, const AnsatzCenter& center, ComplexField& out) {
  if (!(u.grid() == ygrid_) || u.components() != 1)
    throw ConfigError("ansatz profile is not a scalar field on the builder's y-grid");
  if (!(out.grid() == xgrid_) || out.components() != 1) out = ComplexField(xgrid_, 1);
  const int d = xgrid_.dim;
  const double se = std::sqrt(eps_);

  std::array<AxisWindow, kMaxDim> win;
  for (int a = 0; a < d; ++a) {
    const double ly = ygrid_.half_width[a];
    const double lo = center.x(a) - ly * se;
    const double hi = center.x(a) + ly * se;
    if (lo < -xgrid_.half_width[a] || hi > xgrid_.half_width[a]) {
      std::ostringstream os;
      os << "scaled profile box [" << lo << ", " << hi << "] leaves the x-box [-"
         << xgrid_.half_width[a] << ", " << xgrid_.half_width[a] << ") on axis " << a;
      throw InterpolationError(os.str());
    }
    const double hx = xgrid_.spacing(a);
    const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((lo + xgrid_.half_width[a]) / hx)));
    std::size_t last = first;
    while (last < xgrid_.points[a] && xgrid_.node(a, last) < hi) ++last;
    AxisWindow& w = win[a];
    w.first = first;
    w.count = last - first;
    const std::size_t ny = ygrid_.points[a];
    const double period = 2.0 * ly;
    w.kernel.resize(static_cast<Eigen::Index>(w.count), static_cast<Eigen::Index>(ny));
    w.phase.resize(static_cast<Eigen::Index>(w.count));
    for (std::size_t j = 0; j < w.count; ++j) {
      const double x = xgrid_.node(a, first + j);
      const double y = (x - center.x(a)) / se;
      const bool inside = y >= -ly && y < ly;
      for (std::size_t m = 0; m < ny; ++m)
        w.kernel(j, m) = inside ? dirichlet_kernel(y - ygrid_.node(a, m), ny, period) : 0.0;
      w.phase(j) = std::polar(1.0, center.xi(a) * (x - center.x(a)) / eps_);
    }
  }

  out.set_zero();
  const cplx global = std::pow(eps_, -0.25 * d) * std::polar(1.0, center.action / eps_);
  const auto uv = u.component(0);
  auto ov = out.component(0);
  using RowMatXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n0 = static_cast<Eigen::Index>(ygrid_.points[0]);

  if (d == 1) {
    Eigen::Map<const Eigen::VectorXcd> uvec(uv.data(), n0);
    const Eigen::VectorXcd env = win[0].kernel * uvec;
    for (std::size_t j = 0; j < win[0].count; ++j)
      ov[win[0].first + j] = global * env(static_cast<Eigen::Index>(j)) * win[0].phase(static_cast<Eigen::Index>(j));
    return;
  }

  const auto n1 = static_cast<Eigen::Index>(ygrid_.points[1]);
  const auto n2 = d == 3 ? static_cast<Eigen::Index>(ygrid_.points[2]) : Eigen::Index{1};
  // Contract axis 0: (count0 x N0) * (N0 x N1*N2).
  Eigen::Map<const RowMatXcd> umat(uv.data(), n0, n1 * n2);
  const RowMatXcd t0 = win[0].kernel * umat;
  const std::size_t nx1 = xgrid_.points[1];
  const std::size_t nx2 = d == 3 ? xgrid_.points[2] : 1;
  for (std::size_t j0 = 0; j0 < win[0].count; ++j0) {
    const auto row = static_cast<Eigen::Index>(j0);
    Eigen::Map<const RowMatXcd> slab(t0.data() + row * n1 * n2, n1, n2);
    // Contract axis 1 (and axis 2 for d = 3).
    RowMatXcd t1 = win[1].kernel * slab;  // count1 x N2
    if (d == 3) t1 = t1 * win[2].kernel.transpose();
    const cplx p0 = global * win[0].phase(row);
    const std::size_t base0 = (win[0].first + j0) * nx1 * nx2;
    for (std::size_t j1 = 0; j1 < win[1].count; ++j1) {
      const cplx p1 = p0 * win[1].phase(static_cast<Eigen::Index>(j1));
      const std::size_t base1 = base0 + (win[1].first + j1) * nx2;
      if (d == 2) {
        ov[base1] = p1 * t1(static_cast<Eigen::Index>(j1), 0);
      } else {
        for (std::size_t j2 = 0; j2 < win[2].count; ++j2)
          ov[base1 + win[2].first + j2] = p1 * win[2].phase(static_cast<Eigen::Index>(j2)) *
                                          t1(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j2));
      }
    }
  }
}

ComplexField AnsatzBuilder::build(const ComplexField& u, const AnsatzCenter& center) {
  ComplexField out(xgrid_, 1);
  build(u, center, out);
  return out;
}

void check_profile_resolved(const ComplexField& u, double tolerance) {
  const GridSpec& g = u.grid();
  ComplexField hat = u;
  Fft fft(g, u.components());
  fft.forward(hat.values());
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < u.points(); ++i) {
    const auto idx = g.unflatten(i);
    bool high = false;
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t n = g.points[a];
      const std::size_t m = idx[a] < n / 2 ? idx[a] : n - idx[a];
      if (4 * m > 3 * (n / 2)) high = true;
    }
    double a2 = 0.0;
    for (int c = 0; c < u.components(); ++c) a2 += std::norm(hat.at(c, i));
    total += a2;
    if (high) tail += a2;
  }
  if (total > 0.0 && tail > tolerance * total) {
    std::ostringstream os;
    os << "profile grid too coarse: " << tail / total
       << " of the spectral mass sits in the top quarter of frequencies";
    throw InterpolationError(os.str());
  }
}

ComplexField build_ansatz(const ComplexField& u, const TrajectoryRecord& record, double eps, double t,
                          const GridSpec& xgrid) {
  check_profile_resolved(u);
  const TrajectoryRecord::State s = record.at(t);
  AnsatzBuilder builder(u.grid(), xgrid, eps);
  return builder.build(u, {s.x, s.xi, s.action});
}

// --- Polarization --------------------------------------------------------------

EigenFrame::EigenFrame(const MatrixPotentialModel& model, const GridSpec& grid) : grid_(grid) {
  const std::size_t n = grid.size();
  cos_half_.resize(n);
  sin_half_.resize(n);
  alpha_.resize(n);
  std::array<std::size_t, kMaxDim> stride{1, 1, 1};
  for (int a = grid.dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * grid.points[a + 1];
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = grid.unflatten(i);
    std::optional<double> ref;
    for (int a = grid.dim - 1; a >= 0; --a) {
      if (idx[a] > 0) {
        ref = alpha_[i - stride[a]];
        break;
      }
    }
    const EigenData e = model.eigen(grid.position(i), ref);
    alpha_[i] = e.alpha;
    cos_half_[i] = e.chi_plus(0);
    sin_half_[i] = e.chi_plus(1);
  }
}

Eigen::Vector2d EigenFrame::chi(Mode m, std::size_t i) const {
  return m == Mode::plus ? Eigen::Vector2d(cos_half_[i], sin_half_[i])
                         : Eigen::Vector2d(-sin_half_[i], cos_half_[i]);
}

void add_polarized(ComplexField& field2, const ComplexField& scalar, const EigenFrame& frame, Mode m,
                   cplx weight) {
  if (field2.components() != 2 || scalar.components() != 1 || !(field2.grid() == scalar.grid()) ||
      !(frame.grid() == scalar.grid()))
    throw ConfigError("add_polarized: shape mismatch");
  const auto s = scalar.component(0);
  auto c0 = field2.component(0);
  auto c1 = field2.component(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Eigen::Vector2d chi = frame.chi(m, i);
    const cplx v = weight * s[i];
    c0[i] += chi(0) * v;
    c1[i] += chi(1) * v;
  }
}

ComplexField polarize(const ComplexField& scalar, const EigenFrame& frame, Mode m) {
  ComplexField out(scalar.grid(), 2);
  add_polarized(out, scalar, frame, m);
  return out;
}

ComplexField polarize(const ComplexField& scalar, const MatrixPotentialModel& model, Mode m) {
  return polarize(scalar, EigenFrame(model, scalar.grid()), m);
}

ComplexField mode_project(const ComplexField& field2, const EigenFrame& frame, Mode m) {
  if (field2.components() != 2 || !(frame.grid() == field2.grid()))
    throw ConfigError("mode_project: shape mismatch");
  ComplexField out(field2.grid(), 1);
  const auto c0 = field2.component(0);
  const auto c1 = field2.component(1);
  auto o = out.component(0);
  for (std::size_t i = 0; i < o.size(); ++i) {
    const Eigen::Vector2d chi = frame.chi(m, i);
    o[i] = chi(0) * c0[i] + chi(1) * c1[i];
  }
  return out;
}

ComplexField mode_project(const ComplexField& field2, const MatrixPotentialModel& model, Mode m) {
  return mode_project(field2, EigenFrame(model, field2.grid()), m);
}

// --- Snapshot files --------------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'W', 'P', 'L', 'B', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw FormatError("snapshot truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double eps, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  const GridSpec& g = field.grid();
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(g.dim));
  put_u64(os, static_cast<std::uint64_t>(field.components()));
  for (int a = 0; a < g.dim; ++a) put_u64(os, g.points[a]);
  for (int a = 0; a < g.dim; ++a) put_f64(os, g.half_width[a]);
  put_f64(os, eps);
  put_f64(os, t);
  for (const cplx& v : field.values()) {
    put_f64(os, v.real());
    put_f64(os, v.imag());
  }
  if (!os) throw FormatError("write failed for " + path.string());
}

FieldSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0) throw FormatError("bad snapshot magic");
  GridSpec g;
  const std::uint64_t d = get_u64(is);
  if (d < 1 || d > kMaxDim) throw FormatError("bad snapshot dimension");
  g.dim = static_cast<int>(d);
  const std::uint64_t comps = get_u64(is);
  if (comps != 1 && comps != 2) throw FormatError("bad snapshot component count");
  for (int a = 0; a < g.dim; ++a) g.points[a] = get_u64(is);
  for (int a = 0; a < g.dim; ++a) g.half_width[a] = get_f64(is);
  FieldSnapshot snap;
  snap.eps = get_f64(is);
  snap.t = get_f64(is);
  try {
    snap.field = ComplexField(g, static_cast<int>(comps));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad snapshot grid: ") + e.what());
  }
  for (cplx& v : snap.field.values()) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    v = {re, im};
  }
  return snap;
}

}  // namespace wplab
