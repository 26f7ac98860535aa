#include "csc/array.hpp"

#include <cmath>
#include <utility>

#include "csc/error.hpp"

namespace csc {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidArgument(std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

std::string to_string(Shape s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width);
}

void require_same_shape(Shape a, Shape b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": shape " + to_string(a) + " does not match " +
                         to_string(b));
  }
}

Image::Image(std::size_t height, std::size_t width, double fill)
    : shape_{height, width}, data_(height * width, fill) {
  if (height == 0 || width == 0) throw DimensionError("image dimensions must be positive");
}

Image::Image(std::size_t height, std::size_t width, std::vector<double> data)
    : shape_{height, width}, data_(std::move(data)) {
  if (height == 0 || width == 0) throw DimensionError("image dimensions must be positive");
  if (data_.size() != height * width) {
    throw DimensionError("image data length " + std::to_string(data_.size()) +
                         " does not match " + to_string(shape_));
  }
  require_finite(data_, "image");
}

CoefficientMaps::CoefficientMaps(std::size_t num_maps, std::size_t height, std::size_t width,
                                 double fill)
    : num_maps_(num_maps), shape_{height, width}, data_(num_maps * height * width, fill) {
  if (num_maps == 0 || height == 0 || width == 0) {
    throw DimensionError("coefficient map dimensions must be positive");
  }
}

CoefficientMaps::CoefficientMaps(std::size_t num_maps, std::size_t height, std::size_t width,
                                 std::vector<double> data)
    : num_maps_(num_maps), shape_{height, width}, data_(std::move(data)) {
  if (num_maps == 0 || height == 0 || width == 0) {
    throw DimensionError("coefficient map dimensions must be positive");
  }
  if (data_.size() != num_maps * height * width) {
    throw DimensionError("coefficient data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(num_maps) + "x" + to_string(shape_));
  }
  require_finite(data_, "coefficient maps");
}

Dictionary::Dictionary(std::size_t filter_height, std::size_t filter_width,
                       std::size_t num_filters, std::vector<double> filters, bool normalized)
    : filter_shape_{filter_height, filter_width},
      num_filters_(num_filters),
      filters_(std::move(filters)),
      normalized_(normalized) {
  if (filter_height == 0 || filter_width == 0 || num_filters == 0) {
    throw DimensionError("dictionary dimensions must be positive");
  }
  if (filters_.size() != filter_shape_.size() * num_filters) {
    throw DimensionError("dictionary holds " + std::to_string(filters_.size()) +
                         " values, expected " +
                         std::to_string(filter_shape_.size() * num_filters));
  }
  require_finite(filters_, "dictionary");
  if (normalized_) {
    for (std::size_t m = 0; m < num_filters_; ++m) {
      const double n = norm2(filter(m));
      if (std::abs(n - 1.0) > kNormTolerance) {
        throw InvalidArgument("filter " + std::to_string(m) + " has norm " + std::to_string(n) +
                              " but the dictionary is flagged normalized");
      }
    }
  }
}

Dictionary Dictionary::normalize(std::size_t filter_height, std::size_t filter_width,
                                 std::size_t num_filters, std::vector<double> filters) {
  const std::size_t n = filter_height * filter_width;
  if (filters.size() != n * num_filters) {
    throw DimensionError("dictionary value count does not match its shape");
  }
  for (std::size_t m = 0; m < num_filters; ++m) {
    std::span<double> f(filters.data() + m * n, n);
    const double nrm = norm2(f);
    if (nrm == 0.0) throw InvalidArgument("cannot normalize an all-zero filter");
    for (double& v : f) v /= nrm;
  }
  return Dictionary(filter_height, filter_width, num_filters, std::move(filters), true);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace csc
