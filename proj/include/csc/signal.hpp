#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "csc/array.hpp"
#include "csc/fft.hpp"

namespace csc {

// Zero-padded filter spectra at a fixed image size.  Spectra are stored
// frequency-major (all M filters for frequency k are contiguous) since every
// solver works one frequency at a time.
class SpectralDictionary {
public:
  SpectralDictionary(const Dictionary& dict, Shape image_shape);

  const Fft2d& fft() const { return fft_; }
  Shape image_shape() const { return fft_.shape(); }
  std::size_t num_filters() const { return num_filters_; }
  std::size_t num_frequencies() const { return fft_.spectrum_size(); }

  // Row vector of filter spectra at frequency k.
  std::span<const cplx> at(std::size_t k) const {
    return {spectra_.data() + k * num_filters_, num_filters_};
  }

private:
  Fft2d fft_;
  std::size_t num_filters_;
  std::vector<cplx> spectra_;
};

// Per-map spectra of a coefficient stack, map-major.
std::vector<cplx> forward_maps(const Fft2d& fft, const CoefficientMaps& x);
CoefficientMaps inverse_maps(const Fft2d& fft, std::span<const cplx> spectra, std::size_t num_maps);

// sum_m d_m * x_m, circular.
Image apply_dictionary(const Dictionary& d, const CoefficientMaps& x);
Image apply_dictionary(const SpectralDictionary& d, const CoefficientMaps& x);
// Same, starting from map-major spectra of x.
Image apply_dictionary_spectral(const SpectralDictionary& d, std::span<const cplx> x_spectra);

// Map m is the circular correlation of s with d_m.
CoefficientMaps apply_dictionary_adjoint(const Dictionary& d, const Image& s);
CoefficientMaps apply_dictionary_adjoint(const SpectralDictionary& d, const Image& s);

struct LowpassSplit {
  Image lowpass;
  Image highpass;
};

// argmin_l 1/2||l - s||^2 + lambda/2 (||grad_r l||^2 + ||grad_c l||^2) with
// circular [-1, 1] differences; highpass = s - lowpass.
LowpassSplit tikhonov_lowpass(const Image& s, double lambda);

struct NoiseConfig {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Counter-based normal deviates.  Uniform word i is the SplitMix64 output
// mix(seed + (i + 1) * 0x9E3779B97F4A7C15); pixels 2k and 2k+1 take the cosine
// and sine branches of Box-Muller applied to words 2k (u1, in (0,1]) and
// 2k+1 (u2, in [0,1)), each using the top 53 bits.
std::vector<double> gaussian_sequence(std::uint64_t seed, std::size_t count);

// s + sigma * N(0,1), unclipped.  sigma == 0 returns s unchanged.
Image add_gaussian_noise(const Image& s, const NoiseConfig& noise);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

// 10 log10(1 / MSE) with unit peak; kInfinitePsnr when the images match.
double psnr(const Image& reference, const Image& test);

}  // namespace csc
