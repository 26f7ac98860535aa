#include "csc/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "csc/error.hpp"

namespace csc {

struct Fft2d::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

namespace {

// fftw_plan_* is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct AlignedBuffer {
  explicit AlignedBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~AlignedBuffer() { fftw_free(ptr); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  void* ptr;
};

std::shared_ptr<const Fft2d::Plans> plans_for(Shape shape) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<Fft2d::Plans>> cache;
  auto key = std::make_pair(shape.height, shape.width);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int h = static_cast<int>(shape.height);
  const int w = static_cast<int>(shape.width);
  const std::size_t n_complex = shape.height * (shape.width / 2 + 1);
  AlignedBuffer real(sizeof(double) * shape.size());
  AlignedBuffer spec(sizeof(fftw_complex) * n_complex);
  auto plans = std::make_shared<Fft2d::Plans>();
  plans->forward = fftw_plan_dft_r2c_2d(h, w, static_cast<double*>(real.ptr),
                                        static_cast<fftw_complex*>(spec.ptr), FFTW_ESTIMATE);
  plans->inverse = fftw_plan_dft_c2r_2d(h, w, static_cast<fftw_complex*>(spec.ptr),
                                        static_cast<double*>(real.ptr), FFTW_ESTIMATE);
  if (!plans->forward || !plans->inverse) throw Error("FFTW planning failed for " + to_string(shape));
  cache.emplace(key, plans);
  return plans;
}

}  // namespace

Fft2d::Fft2d(Shape shape) : shape_(shape), plans_(nullptr) {
  if (shape.height == 0 || shape.width == 0) throw DimensionError("FFT size must be positive");
  plans_ = plans_for(shape);
  // Column j of the half plane stands for itself and its mirror W - j,
  // except j == 0 and (even W) j == W/2.
  const std::size_t sw = spectrum_width();
  bin_weights_.assign(spectrum_size(), 2.0);
  for (std::size_t r = 0; r < shape.height; ++r) {
    bin_weights_[r * sw] = 1.0;
    if (shape.width % 2 == 0) bin_weights_[r * sw + sw - 1] = 1.0;
  }
}

void Fft2d::forward(std::span<const double> in, std::span<cplx> out) const {
  if (in.size() != shape_.size() || out.size() != spectrum_size()) {
    throw DimensionError("FFT forward: buffer size does not match " + to_string(shape_));
  }
  AlignedBuffer real(sizeof(double) * in.size());
  AlignedBuffer spec(sizeof(fftw_complex) * out.size());
  std::copy(in.begin(), in.end(), static_cast<double*>(real.ptr));
  fftw_execute_dft_r2c(plans_->forward, static_cast<double*>(real.ptr),
                       static_cast<fftw_complex*>(spec.ptr));
  const auto* s = static_cast<const cplx*>(spec.ptr);
  std::copy(s, s + out.size(), out.begin());
}

void Fft2d::inverse(std::span<const cplx> in, std::span<double> out) const {
  if (in.size() != spectrum_size() || out.size() != shape_.size()) {
    throw DimensionError("FFT inverse: buffer size does not match " + to_string(shape_));
  }
  AlignedBuffer real(sizeof(double) * out.size());
  AlignedBuffer spec(sizeof(fftw_complex) * in.size());
  std::copy(in.begin(), in.end(), static_cast<cplx*>(spec.ptr));
  // c2r overwrites its input; `spec` is scratch.
  fftw_execute_dft_c2r(plans_->inverse, static_cast<fftw_complex*>(spec.ptr),
                       static_cast<double*>(real.ptr));
  const double scale = 1.0 / static_cast<double>(shape_.size());
  const auto* r = static_cast<const double*>(real.ptr);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i] * scale;
}

std::vector<cplx> Fft2d::forward(std::span<const double> in) const {
  std::vector<cplx> out(spectrum_size());
  forward(in, out);
  return out;
}

std::vector<double> Fft2d::inverse(std::span<const cplx> in) const {
  std::vector<double> out(shape_.size());
  inverse(in, out);
  return out;
}

std::vector<cplx> padded_spectrum(const Fft2d& fft, std::span<const double> kernel,
                                  Shape kernel_shape) {
  const Shape s = fft.shape();
  if (kernel_shape.height > s.height || kernel_shape.width > s.width) {
    throw DimensionError("kernel support " + to_string(kernel_shape) + " exceeds image " +
                         to_string(s));
  }
  std::vector<double> padded(s.size(), 0.0);
  for (std::size_t r = 0; r < kernel_shape.height; ++r) {
    for (std::size_t c = 0; c < kernel_shape.width; ++c) {
      padded[r * s.width + c] = kernel[r * kernel_shape.width + c];
    }
  }
  return fft.forward(padded);
}

}  // namespace csc
