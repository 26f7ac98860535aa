#include "csc/groups.hpp"

#include <algorithm>
#include <cmath>

#include "csc/error.hpp"
#include "csc/signal.hpp"

namespace csc {

GroupKernels GroupKernels::unit(Shape shape, std::size_t num_filters) {
  return {shape, num_filters, std::vector<double>(shape.size() * num_filters, 1.0)};
}

bool GroupKernels::is_unit() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 1.0; });
}

GroupOperator::GroupOperator(GroupKernels kernels, Shape image_shape)
    : kernels_(std::move(kernels)), fft_(image_shape) {
  if (kernels_.num_filters == 0 || kernels_.shape.size() == 0) {
    throw DimensionError("group kernels must be nonempty");
  }
  if (kernels_.values.size() != kernels_.shape.size() * kernels_.num_filters) {
    throw DimensionError("group kernel table size does not match its shape");
  }
  for (double v : kernels_.values) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("group kernel entries must be >= 0");
  }
  const std::size_t nk = fft_.spectrum_size();
  const std::size_t nm = kernels_.num_filters;
  spectra_.resize(nk * nm);
  for (std::size_t m = 0; m < nm; ++m) {
    const auto spec = padded_spectrum(fft_, kernels_.kernel(m), kernels_.shape);
    for (std::size_t k = 0; k < nk; ++k) spectra_[k * nm + m] = spec[k];
  }
}

namespace {

void check_maps(const GroupOperator& g, const CoefficientMaps& x, const char* op) {
  require_same_shape(x.shape(), g.image_shape(), op);
  if (x.num_maps() != g.num_filters()) {
    throw DimensionError(std::string(op) + ": " + std::to_string(x.num_maps()) +
                         " maps for " + std::to_string(g.num_filters()) + " kernels");
  }
}

}  // namespace

Image group_sums_spectral(const GroupOperator& g, std::span<const cplx> x_spectra) {
  const std::size_t nk = g.fft().spectrum_size();
  const std::size_t nm = g.num_filters();
  if (x_spectra.size() != nk * nm) throw DimensionError("group_sums: spectrum size mismatch");
  std::vector<cplx> acc(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto gk = g.at(k);
    cplx s{};
    for (std::size_t m = 0; m < nm; ++m) s += gk[m] * x_spectra[m * nk + k];
    acc[k] = s;
  }
  const Shape shape = g.image_shape();
  return Image(shape.height, shape.width, g.fft().inverse(acc));
}

Image group_sums(const GroupOperator& g, const CoefficientMaps& x, bool absolute) {
  check_maps(g, x, "group_sums");
  if (!absolute) return group_sums_spectral(g, forward_maps(g.fft(), x));
  CoefficientMaps ax = x;
  for (double& v : ax.values()) v = std::abs(v);
  return group_sums_spectral(g, forward_maps(g.fft(), ax));
}

CoefficientMaps group_sums_adjoint(const GroupOperator& g, const Image& v) {
  require_same_shape(v.shape(), g.image_shape(), "group_sums_adjoint");
  const std::size_t nk = g.fft().spectrum_size();
  const std::size_t nm = g.num_filters();
  const auto vh = g.fft().forward(v.values());
  std::vector<cplx> spectra(nk * nm);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto gk = g.at(k);
    for (std::size_t m = 0; m < nm; ++m) spectra[m * nk + k] = std::conj(gk[m]) * vh[k];
  }
  return inverse_maps(g.fft(), spectra, nm);
}

double outer_max(std::span<const double> sums, std::span<const double> group_weights) {
  if (!group_weights.empty() && group_weights.size() != sums.size()) {
    throw DimensionError("group weight count does not match number of groups");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    best = std::max(best, group_weights.empty() ? sums[i] : group_weights[i] * sums[i]);
  }
  return best;
}

double outer_l2(std::span<const double> sums, std::span<const double> group_weights) {
  if (!group_weights.empty() && group_weights.size() != sums.size()) {
    throw DimensionError("group weight count does not match number of groups");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    acc += (group_weights.empty() ? 1.0 : group_weights[i]) * sums[i] * sums[i];
  }
  return std::sqrt(acc);
}

namespace {

void check_group_weights(std::span<const double> w) {
  for (double v : w) {
    if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument("group weights must be > 0");
  }
}

// Group sums of |x| are nonnegative; clear FFT rounding below zero.
Image abs_group_sums(const GroupOperator& g, const CoefficientMaps& x) {
  Image s = group_sums(g, x, true);
  for (double& v : s.values()) v = std::max(v, 0.0);
  return s;
}

}  // namespace

double norm_l1inf(const GroupOperator& g, const CoefficientMaps& x,
                  std::span<const double> group_weights) {
  check_group_weights(group_weights);
  return std::max(0.0, outer_max(abs_group_sums(g, x).values(), group_weights));
}

double norm_l12(const GroupOperator& g, const CoefficientMaps& x,
                std::span<const double> group_weights) {
  check_group_weights(group_weights);
  return outer_l2(abs_group_sums(g, x).values(), group_weights);
}

GroupKernels stripe_weight_kernels(const Dictionary& d) {
  if (!d.normalized()) {
    throw InvalidArgument("stripe_weight_kernels: dictionary is not flagged normalized");
  }
  const std::size_t fh = d.filter_height();
  const std::size_t fw = d.filter_width();
  GroupKernels k{d.filter_shape(), d.num_filters(),
                 std::vector<double>(d.filter_shape().size() * d.num_filters())};
  for (std::size_t m = 0; m < d.num_filters(); ++m) {
    for (std::size_t dr = 0; dr < fh; ++dr) {
      for (std::size_t dc = 0; dc < fw; ++dc) {
        double acc = 0.0;
        for (std::size_t r = dr; r < fh; ++r) {
          for (std::size_t c = dc; c < fw; ++c) acc += d(m, r, c) * d(m, r, c);
        }
        k.values[(m * fh + dr) * fw + dc] = std::sqrt(acc);
      }
    }
  }
  return k;
}

}  // namespace csc
