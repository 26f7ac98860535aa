#include "csc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csc/error.hpp"
#include "csc/signal.hpp"

namespace csc::synth {

namespace {

constexpr double kPi = std::numbers::pi;

// SplitMix64 uniform stream for scene layout.
class Uniform {
public:
  explicit Uniform(std::uint64_t seed) : state_(seed) {}
  double next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return double(z >> 11) * (1.0 / 9007199254740992.0);
  }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
  std::uint64_t state_;
};

// Coordinates normalized to [0,1) so scenes scale with the image size.
template <class F>
Image render(Shape shape, F&& f) {
  std::vector<double> v(shape.size());
  for (std::size_t r = 0; r < shape.height; ++r) {
    for (std::size_t c = 0; c < shape.width; ++c) {
      const double y = (double(r) + 0.5) / double(shape.height);
      const double x = (double(c) + 0.5) / double(shape.width);
      v[r * shape.width + c] = std::clamp(f(y, x, double(r), double(c)), 0.0, 1.0);
    }
  }
  return Image(shape.height, shape.width, std::move(v));
}

bool inside_triangle(double y, double x, double ay, double ax, double by, double bx, double cy,
                     double cx) {
  auto side = [](double py, double px, double qy, double qx, double ry, double rx) {
    return (px - rx) * (qy - ry) - (qx - rx) * (py - ry);
  };
  const double d1 = side(y, x, ay, ax, by, bx);
  const double d2 = side(y, x, by, bx, cy, cx);
  const double d3 = side(y, x, cy, cx, ay, ax);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

Image shapes(Shape shape) {
  return render(shape, [](double y, double x, double, double) {
    double v = 0.35 + 0.15 * x;
    if (std::hypot(y - 0.3, x - 0.3) < 0.18) v = 0.85;
    if (y > 0.55 && y < 0.85 && x > 0.12 && x < 0.42) v = 0.12;
    if (inside_triangle(y, x, 0.15, 0.75, 0.55, 0.55, 0.55, 0.95)) v = 0.65;
    const double ey = (y - 0.75) / 0.12;
    const double ex = (x - 0.72) / 0.2;
    if (ey * ey + ex * ex < 1.0) v += 0.06;
    return v;
  });
}

Image texture(Shape shape) {
  return render(shape, [](double y, double x, double r, double c) {
    if (x < 0.5) {
      const double t = 0.866 * c + 0.5 * r;
      const double amp = y < 0.5 ? 0.25 : 0.08;
      return 0.5 + amp * std::sin(2.0 * kPi * t / 6.0);
    }
    if (y < 0.5) {
      const bool odd = (int(r) / 4 + int(c) / 4) % 2 != 0;
      return 0.45 + (odd ? 0.1 : -0.1);
    }
    return 0.3 + 0.3 * (y - 0.5) + 0.2 * (x - 0.5);
  });
}

Image mixed(Shape shape) {
  return render(shape, [shape](double y, double x, double r, double c) {
    double v = 0.2 + 0.5 * std::exp(-((y - 0.6) * (y - 0.6) + (x - 0.4) * (x - 0.4)) / 0.15);
    // Thin lines of decreasing contrast.
    const double rows[3] = {0.15, 0.25, 0.35};
    const double contrast[3] = {0.4, 0.2, 0.08};
    for (int i = 0; i < 3; ++i) {
      if (std::abs(r - rows[i] * double(shape.height)) < 1.0 && x > 0.1 && x < 0.9) v += contrast[i];
    }
    const double d = std::hypot(y - 0.7, x - 0.75);
    if (d < 0.17) v = 0.55 + 0.2 * std::sin(2.0 * kPi * (r + c) / 5.0);
    if (std::abs(x - y) < 0.01 && y > 0.45 && y < 0.95 && x < 0.55) v = 0.95;
    return v;
  });
}

Image blocks(Shape shape, std::uint64_t seed) {
  Uniform u(seed);
  struct Rect {
    double y0, y1, x0, x1, value;
  };
  std::vector<Rect> rects;
  for (int i = 0; i < 14; ++i) {
    const double y0 = u.range(0.0, 0.85);
    const double x0 = u.range(0.0, 0.85);
    rects.push_back({y0, y0 + u.range(0.08, 0.35), x0, x0 + u.range(0.08, 0.35), u.range(0.05, 0.95)});
  }
  return render(shape, [&](double y, double x, double, double) {
    double v = 0.25 + 0.3 * y;
    for (const auto& rc : rects) {
      if (y >= rc.y0 && y < rc.y1 && x >= rc.x0 && x < rc.x1) v = rc.value;
    }
    return v;
  });
}

std::vector<double> zero_mean_normalized(std::vector<double> f) {
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= double(f.size());
  double nrm = 0.0;
  for (double& v : f) {
    v -= mean;
    nrm += v * v;
  }
  nrm = std::sqrt(nrm);
  for (double& v : f) v /= nrm;
  return f;
}

std::vector<double> random_filters(Shape fs, std::size_t count, std::uint64_t seed) {
  const auto g = gaussian_sequence(seed, fs.size() * count);
  std::vector<double> out;
  for (std::size_t m = 0; m < count; ++m) {
    auto f = zero_mean_normalized(std::vector<double>(g.begin() + std::ptrdiff_t(m * fs.size()),
                                                      g.begin() + std::ptrdiff_t((m + 1) * fs.size())));
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::vector<double> dct_filters(Shape fs, std::size_t count) {
  struct Freq {
    std::size_t u, v;
  };
  std::vector<Freq> freqs;
  for (std::size_t u = 0; u < fs.height; ++u) {
    for (std::size_t v = 0; v < fs.width; ++v) {
      if (u + v > 0) freqs.push_back({u, v});
    }
  }
  if (count > freqs.size()) throw InvalidArgument("dct dictionary: too many filters for support");
  std::stable_sort(freqs.begin(), freqs.end(),
                   [](const Freq& a, const Freq& b) { return a.u + a.v < b.u + b.v; });
  std::vector<double> out;
  for (std::size_t m = 0; m < count; ++m) {
    std::vector<double> f(fs.size());
    for (std::size_t r = 0; r < fs.height; ++r) {
      for (std::size_t c = 0; c < fs.width; ++c) {
        f[r * fs.width + c] = std::cos(kPi * (double(r) + 0.5) * double(freqs[m].u) / double(fs.height)) *
                              std::cos(kPi * (double(c) + 0.5) * double(freqs[m].v) / double(fs.width));
      }
    }
    f = zero_mean_normalized(std::move(f));
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

// Orientations x frequencies x phases, cycled until `count` filters exist.
std::vector<double> gabor_filters(Shape fs, std::size_t count) {
  const int orientations = 8;
  const double periods[] = {3.0, 6.0};
  const double phases[] = {0.0, kPi / 2.0};
  const double cy = (double(fs.height) - 1.0) / 2.0;
  const double cx = (double(fs.width) - 1.0) / 2.0;
  const double sigma = 0.3 * double(std::max(fs.height, fs.width));
  std::vector<double> out;
  std::size_t made = 0;
  for (int scale = 0; made < count; ++scale) {
    for (double period : periods) {
      for (double phase : phases) {
        for (int o = 0; o < orientations && made < count; ++o) {
          const double theta = kPi * double(o) / orientations;
          const double s = sigma * (1.0 + 0.5 * scale);
          const double p = period * (1.0 + 0.25 * scale);
          std::vector<double> f(fs.size());
          for (std::size_t r = 0; r < fs.height; ++r) {
            for (std::size_t c = 0; c < fs.width; ++c) {
              const double dy = double(r) - cy;
              const double dx = double(c) - cx;
              const double t = dx * std::cos(theta) + dy * std::sin(theta);
              f[r * fs.width + c] =
                  std::exp(-(dx * dx + dy * dy) / (2.0 * s * s)) * std::cos(2.0 * kPi * t / p + phase);
            }
          }
          f = zero_mean_normalized(std::move(f));
          out.insert(out.end(), f.begin(), f.end());
          ++made;
        }
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& image_names() {
  static const std::vector<std::string> names = {"shapes", "texture", "mixed", "blocks"};
  return names;
}

Image test_image(const std::string& name, Shape shape, std::uint64_t seed) {
  if (shape.height == 0 || shape.width == 0) throw DimensionError("test image must be nonempty");
  if (name == "shapes") return shapes(shape);
  if (name == "texture") return texture(shape);
  if (name == "mixed") return mixed(shape);
  if (name == "blocks") return blocks(shape, seed);
  throw InvalidArgument("unknown test image '" + name + "'");
}

const std::vector<std::string>& dictionary_kinds() {
  static const std::vector<std::string> kinds = {"random", "dct", "gabor"};
  return kinds;
}

Dictionary dictionary(const std::string& kind, Shape filter_shape, std::size_t num_filters,
                      std::uint64_t seed) {
  if (filter_shape.size() < 2 || num_filters == 0) {
    throw InvalidArgument("dictionary needs at least 2 taps and one filter");
  }
  std::vector<double> values;
  if (kind == "random") {
    values = random_filters(filter_shape, num_filters, seed);
  } else if (kind == "dct") {
    values = dct_filters(filter_shape, num_filters);
  } else if (kind == "gabor") {
    values = gabor_filters(filter_shape, num_filters);
  } else {
    throw InvalidArgument("unknown dictionary kind '" + kind + "'");
  }
  return Dictionary::normalize(filter_shape.height, filter_shape.width, num_filters, std::move(values));
}

}  // namespace csc::synth
