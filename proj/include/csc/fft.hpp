#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "csc/array.hpp"

namespace csc {

using cplx = std::complex<double>;

// Real-to-complex 2-D DFT of a fixed size, backed by FFTW.  Spectra hold the
// non-redundant half plane: height x (width/2 + 1), row-major.  The inverse
// is normalized so inverse(forward(a)) == a.
//
// Plans are created once per size (under a lock) and shared; transforms
// are safe to call concurrently.
class Fft2d {
public:
  explicit Fft2d(Shape shape);

  Shape shape() const { return shape_; }
  std::size_t spectrum_width() const { return shape_.width / 2 + 1; }
  std::size_t spectrum_size() const { return shape_.height * spectrum_width(); }

  void forward(std::span<const double> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  std::vector<cplx> forward(std::span<const double> in) const;
  std::vector<double> inverse(std::span<const cplx> in) const;

  // Multiplicity of each half-plane bin in the full spectrum (1 or 2).
  // Needed for Parseval sums over the half plane.
  const std::vector<double>& bin_weights() const { return bin_weights_; }

  struct Plans;

private:
  Shape shape_;
  std::shared_ptr<const Plans> plans_;
  std::vector<double> bin_weights_;
};

// DFT of a small kernel zero-padded to `shape` with its origin at (0,0).
std::vector<cplx> padded_spectrum(const Fft2d& fft, std::span<const double> kernel, Shape kernel_shape);

}  // namespace csc
