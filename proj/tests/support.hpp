#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "csc/array.hpp"

namespace testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline csc::Image random_image(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  return csc::Image(h, w, random_vector(rng, h * w));
}

inline csc::CoefficientMaps random_maps(std::mt19937_64& rng, std::size_t m, std::size_t h,
                                        std::size_t w) {
  return csc::CoefficientMaps(m, h, w, random_vector(rng, m * h * w));
}

inline csc::Dictionary random_dictionary(std::mt19937_64& rng, std::size_t fh, std::size_t fw,
                                         std::size_t m) {
  return csc::Dictionary::normalize(fh, fw, m, random_vector(rng, fh * fw * m));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// sum_m sum_{dr,dc} d_m[dr][dc] x_m(r - dr, c - dc), circular.
inline csc::Image direct_synthesis(const csc::Dictionary& d, const csc::CoefficientMaps& x) {
  const std::size_t h = x.height(), w = x.width();
  csc::Image out(h, w);
  for (std::size_t m = 0; m < d.num_filters(); ++m)
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        for (std::size_t dr = 0; dr < d.filter_height(); ++dr)
          for (std::size_t dc = 0; dc < d.filter_width(); ++dc)
            out(r, c) += d(m, dr, dc) * x(m, (r + h - dr % h) % h, (c + w - dc % w) % w);
  return out;
}

}  // namespace testing
