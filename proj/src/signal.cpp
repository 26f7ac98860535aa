#include "csc/signal.hpp"

#include <cmath>
#include <numbers>

#include "csc/error.hpp"

namespace csc {

namespace {

void require_fits(const Dictionary& d, Shape image) {
  if (d.filter_height() > image.height || d.filter_width() > image.width) {
    throw DimensionError("filter support " + to_string(d.filter_shape()) +
                         " exceeds image " + to_string(image));
  }
}

}  // namespace

SpectralDictionary::SpectralDictionary(const Dictionary& dict, Shape image_shape)
    : fft_(image_shape), num_filters_(dict.num_filters()) {
  require_fits(dict, image_shape);
  const std::size_t nk = fft_.spectrum_size();
  spectra_.resize(nk * num_filters_);
  for (std::size_t m = 0; m < num_filters_; ++m) {
    const auto spec = padded_spectrum(fft_, dict.filter(m), dict.filter_shape());
    for (std::size_t k = 0; k < nk; ++k) spectra_[k * num_filters_ + m] = spec[k];
  }
}

std::vector<cplx> forward_maps(const Fft2d& fft, const CoefficientMaps& x) {
  require_same_shape(x.shape(), fft.shape(), "forward_maps");
  const std::size_t nk = fft.spectrum_size();
  std::vector<cplx> out(nk * x.num_maps());
  for (std::size_t m = 0; m < x.num_maps(); ++m) {
    fft.forward(x.map(m), std::span<cplx>(out.data() + m * nk, nk));
  }
  return out;
}

CoefficientMaps inverse_maps(const Fft2d& fft, std::span<const cplx> spectra,
                             std::size_t num_maps) {
  const std::size_t nk = fft.spectrum_size();
  if (spectra.size() != nk * num_maps) throw DimensionError("inverse_maps: spectrum size mismatch");
  CoefficientMaps x(num_maps, fft.shape().height, fft.shape().width);
  for (std::size_t m = 0; m < num_maps; ++m) {
    fft.inverse(spectra.subspan(m * nk, nk), x.map(m));
  }
  return x;
}

Image apply_dictionary_spectral(const SpectralDictionary& d, std::span<const cplx> x_spectra) {
  const std::size_t nk = d.num_frequencies();
  const std::size_t nm = d.num_filters();
  if (x_spectra.size() != nk * nm) {
    throw DimensionError("apply_dictionary: spectra hold " + std::to_string(x_spectra.size()) +
                         " bins, expected " + std::to_string(nk * nm));
  }
  std::vector<cplx> acc(nk, cplx{});
  for (std::size_t k = 0; k < nk; ++k) {
    const auto a = d.at(k);
    cplx s{};
    for (std::size_t m = 0; m < nm; ++m) s += a[m] * x_spectra[m * nk + k];
    acc[k] = s;
  }
  const Shape shape = d.image_shape();
  return Image(shape.height, shape.width, d.fft().inverse(acc));
}

Image apply_dictionary(const SpectralDictionary& d, const CoefficientMaps& x) {
  require_same_shape(x.shape(), d.image_shape(), "apply_dictionary");
  if (x.num_maps() != d.num_filters()) {
    throw DimensionError("apply_dictionary: " + std::to_string(x.num_maps()) +
                         " coefficient maps for " + std::to_string(d.num_filters()) + " filters");
  }
  return apply_dictionary_spectral(d, forward_maps(d.fft(), x));
}

Image apply_dictionary(const Dictionary& d, const CoefficientMaps& x) {
  if (x.num_maps() != d.num_filters()) {
    throw DimensionError("apply_dictionary: " + std::to_string(x.num_maps()) +
                         " coefficient maps for " + std::to_string(d.num_filters()) + " filters");
  }
  return apply_dictionary(SpectralDictionary(d, x.shape()), x);
}

CoefficientMaps apply_dictionary_adjoint(const SpectralDictionary& d, const Image& s) {
  require_same_shape(s.shape(), d.image_shape(), "apply_dictionary_adjoint");
  const std::size_t nk = d.num_frequencies();
  const std::size_t nm = d.num_filters();
  const auto sh = d.fft().forward(s.values());
  std::vector<cplx> spectra(nk * nm);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto a = d.at(k);
    for (std::size_t m = 0; m < nm; ++m) spectra[m * nk + k] = std::conj(a[m]) * sh[k];
  }
  return inverse_maps(d.fft(), spectra, nm);
}

CoefficientMaps apply_dictionary_adjoint(const Dictionary& d, const Image& s) {
  return apply_dictionary_adjoint(SpectralDictionary(d, s.shape()), s);
}

LowpassSplit tikhonov_lowpass(const Image& s, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("tikhonov_lowpass: lambda must be positive, got " + std::to_string(lambda));
  }
  const Fft2d fft(s.shape());
  auto sh = fft.forward(s.values());
  const std::size_t h = s.height();
  const std::size_t w = s.width();
  const std::size_t sw = fft.spectrum_width();
  // |DFT of [-1, 1]|^2 = 2 - 2 cos(2 pi f / n).
  for (std::size_t r = 0; r < h; ++r) {
    const double gr = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * double(r) / double(h));
    for (std::size_t c = 0; c < sw; ++c) {
      const double gc = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * double(c) / double(w));
      sh[r * sw + c] /= 1.0 + lambda * (gr + gc);
    }
  }
  Image low(h, w, fft.inverse(sh));
  std::vector<double> high(s.size());
  for (std::size_t i = 0; i < high.size(); ++i) high[i] = s.values()[i] - low.values()[i];
  return {std::move(low), Image(h, w, std::move(high))};
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t counter_word(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace

std::vector<double> gaussian_sequence(std::uint64_t seed, std::size_t count) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  std::vector<double> out(count);
  for (std::size_t k = 0; 2 * k < count; ++k) {
    const double u1 = (double(counter_word(seed, 2 * k) >> 11) + 1.0) * kScale;
    const double u2 = double(counter_word(seed, 2 * k + 1) >> 11) * kScale;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * k] = radius * std::cos(angle);
    if (2 * k + 1 < count) out[2 * k + 1] = radius * std::sin(angle);
  }
  return out;
}

Image add_gaussian_noise(const Image& s, const NoiseConfig& noise) {
  if (!std::isfinite(noise.sigma) || noise.sigma < 0.0) {
    throw InvalidArgument("noise sigma must be finite and nonnegative");
  }
  if (noise.sigma == 0.0) return s;
  const auto g = gaussian_sequence(noise.seed, s.size());
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.values()[i] + noise.sigma * g[i];
  return Image(s.height(), s.width(), std::move(out));
}

double psnr(const Image& reference, const Image& test) {
  require_same_shape(reference.shape(), test.shape(), "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference.values()[i] - test.values()[i];
    acc += e * e;
  }
  if (acc == 0.0) return kInfinitePsnr;
  const double mse = acc / double(reference.size());
  return -10.0 * std::log10(mse);
}

}  // namespace csc
