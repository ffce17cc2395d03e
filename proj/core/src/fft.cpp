#include "wplab/fft.hpp"

#include "wplab/errors.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace wplab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan as_plan(void* p) { return static_cast<fftw_plan>(p); }

}  // namespace

Fft::Fft(const GridSpec& grid, int batch) : block_(grid.size()), batch_(batch) {
  if (batch < 1) throw ConfigError("FFT batch must be positive");
  int n[kMaxDim];
  for (int i = 0; i < grid.dim; ++i) n[i] = static_cast<int>(grid.points[i]);
  std::vector<cplx> scratch(block_ * static_cast<std::size_t>(batch));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int dist = static_cast<int>(block_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_many_dft(grid.dim, n, batch, buf, nullptr, 1, dist, buf, nullptr, 1, dist,
                                FFTW_FORWARD, flags);
  backward_ = fftw_plan_many_dft(grid.dim, n, batch, buf, nullptr, 1, dist, buf, nullptr, 1, dist,
                                 FFTW_BACKWARD, flags);
  if (!forward_ || !backward_) throw ConfigError("FFTW planning failed");
}

Fft::~Fft() {
  if (!forward_ && !backward_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(as_plan(forward_));
  if (backward_) fftw_destroy_plan(as_plan(backward_));
}

Fft::Fft(Fft&& o) noexcept
    : forward_(std::exchange(o.forward_, nullptr)),
      backward_(std::exchange(o.backward_, nullptr)),
      block_(o.block_),
      batch_(o.batch_) {}

Fft& Fft::operator=(Fft&& o) noexcept {
  if (this != &o) {
    Fft tmp(std::move(*this));
    forward_ = std::exchange(o.forward_, nullptr);
    backward_ = std::exchange(o.backward_, nullptr);
    block_ = o.block_;
    batch_ = o.batch_;
  }
  return *this;
}

void Fft::forward(std::span<cplx> data) const {
  if (data.size() != block_ * static_cast<std::size_t>(batch_))
    throw ConfigError("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(as_plan(forward_), p, p);
}

void Fft::backward(std::span<cplx> data) const {
  if (data.size() != block_ * static_cast<std::size_t>(batch_))
    throw ConfigError("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(as_plan(backward_), p, p);
  const double scale = 1.0 / double(block_);
  for (auto& v : data) v *= scale;
}

}  // namespace wplab
