#pragma once

#include "wplab/grid.hpp"
#include "wplab/types.hpp"

#include <span>

namespace wplab {

/// In-place d-dimensional complex FFT over `batch` contiguous blocks of grid.size() values.
///
/// Plans are built with FFTW_ESTIMATE so the chosen algorithm, and therefore the
/// output bits, do not depend on timing. Planning is serialized internally; execution
/// is thread-safe on distinct buffers.
class Fft {
 public:
  Fft(const GridSpec& grid, int batch = 1);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/N normalization.
  void backward(std::span<cplx> data) const;

  std::size_t block_size() const { return block_; }
  int batch() const { return batch_; }

 private:
  void* forward_ = nullptr;
  void* backward_ = nullptr;
  std::size_t block_ = 0;
  int batch_ = 1;
};

}  // namespace wplab
