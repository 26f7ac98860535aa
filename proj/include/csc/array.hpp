#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace csc {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(Shape s);

// Single-channel real image, row-major.  Reference images live in [0, 1];
// highpass residuals and noisy images are not clipped.
class Image {
public:
  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 0.0);
  Image(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.width + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.width + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const Image&) const = default;

private:
  Shape shape_;
  std::vector<double> data_;
};

// Stack of M coefficient maps, each the size of the represented image.
// Storage is map-major: map m occupies [m*h*w, (m+1)*h*w).
class CoefficientMaps {
public:
  CoefficientMaps() = default;
  CoefficientMaps(std::size_t num_maps, std::size_t height, std::size_t width, double fill = 0.0);
  CoefficientMaps(std::size_t num_maps, std::size_t height, std::size_t width,
                  std::vector<double> data);

  std::size_t num_maps() const { return num_maps_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> map(std::size_t m) { return {data_.data() + m * shape_.size(), shape_.size()}; }
  std::span<const double> map(std::size_t m) const {
    return {data_.data() + m * shape_.size(), shape_.size()};
  }
  double& operator()(std::size_t m, std::size_t r, std::size_t c) {
    return data_[(m * shape_.height + r) * shape_.width + c];
  }
  double operator()(std::size_t m, std::size_t r, std::size_t c) const {
    return data_[(m * shape_.height + r) * shape_.width + c];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const CoefficientMaps&) const = default;

private:
  std::size_t num_maps_ = 0;
  Shape shape_;
  std::vector<double> data_;
};

// Convolutional dictionary: M small filters, filter-major, row-major within
// a filter.  Filter origin is index (0,0) of its support, so the coefficient
// at (r,c) places the filter over pixels [r, r+fh) x [c, c+fw) (circularly).
class Dictionary {
public:
  static constexpr double kNormTolerance = 1e-8;

  Dictionary() = default;
  // When `normalized` is set every filter must have unit l2 norm.
  Dictionary(std::size_t filter_height, std::size_t filter_width, std::size_t num_filters,
             std::vector<double> filters, bool normalized);

  // Rescales every nonzero filter to unit norm and sets the flag.
  static Dictionary normalize(std::size_t filter_height, std::size_t filter_width,
                              std::size_t num_filters, std::vector<double> filters);

  std::size_t filter_height() const { return filter_shape_.height; }
  std::size_t filter_width() const { return filter_shape_.width; }
  Shape filter_shape() const { return filter_shape_; }
  std::size_t num_filters() const { return num_filters_; }
  bool normalized() const { return normalized_; }

  std::span<const double> filter(std::size_t m) const {
    return {filters_.data() + m * filter_shape_.size(), filter_shape_.size()};
  }
  double operator()(std::size_t m, std::size_t r, std::size_t c) const {
    return filters_[(m * filter_shape_.height + r) * filter_shape_.width + c];
  }
  std::span<const double> values() const { return filters_; }

  bool operator==(const Dictionary&) const = default;

private:
  Shape filter_shape_;
  std::size_t num_filters_ = 0;
  std::vector<double> filters_;
  bool normalized_ = false;
};

// Throws DimensionError naming both shapes when they differ.
void require_same_shape(Shape a, Shape b, const char* what);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace csc
