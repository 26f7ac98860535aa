#pragma once

#include <span>
#include <vector>

#include "csc/array.hpp"
#include "csc/fft.hpp"

namespace csc {

// One nonnegative kernel per filter, same support as the dictionary filters.
// Kernel entry k_m[dr][dc] multiplies coefficient x_m(p - (dr, dc)) in the
// group anchored at p.
struct GroupKernels {
  Shape shape;
  std::size_t num_filters = 0;
  std::vector<double> values;  // filter-major, row-major within a kernel

  static GroupKernels unit(Shape shape, std::size_t num_filters);
  bool is_unit() const;
  std::span<const double> kernel(std::size_t m) const {
    return {values.data() + m * shape.size(), shape.size()};
  }
};

// Convolutional group-sum operator
//
//   (G x)(p) = sum_m (k_m * x_m)(p) = sum_m sum_{d in support} k_m[d] x_m(p - d)
//
// With unit kernels the group anchored at p holds every coefficient whose
// filter placement covers pixel p, i.e. all placements overlapping the patch
// at p from above-left.  Circular boundaries throughout.
class GroupOperator {
public:
  GroupOperator(GroupKernels kernels, Shape image_shape);

  const GroupKernels& kernels() const { return kernels_; }
  Shape image_shape() const { return fft_.shape(); }
  std::size_t num_filters() const { return kernels_.num_filters; }
  std::size_t num_groups() const { return image_shape().size(); }
  const Fft2d& fft() const { return fft_; }

  // Kernel spectra at frequency k (frequency-major, like SpectralDictionary).
  std::span<const cplx> at(std::size_t k) const {
    return {spectra_.data() + k * kernels_.num_filters, kernels_.num_filters};
  }

private:
  GroupKernels kernels_;
  Fft2d fft_;
  std::vector<cplx> spectra_;
};

// G x, or G|x| when `absolute` is set.
Image group_sums(const GroupOperator& g, const CoefficientMaps& x, bool absolute);
// G x from map-major spectra of x.
Image group_sums_spectral(const GroupOperator& g, std::span<const cplx> x_spectra);
CoefficientMaps group_sums_adjoint(const GroupOperator& g, const Image& v);

// max_p w_p (G|x|)(p); empty weights mean unit.
double norm_l1inf(const GroupOperator& g, const CoefficientMaps& x,
                  std::span<const double> group_weights = {});
// sqrt(sum_p w_p (G|x|)(p)^2).
double norm_l12(const GroupOperator& g, const CoefficientMaps& x,
                std::span<const double> group_weights = {});

// Same norms from precomputed group sums.
double outer_max(std::span<const double> sums, std::span<const double> group_weights = {});
double outer_l2(std::span<const double> sums, std::span<const double> group_weights = {});

// Inner-norm weights compensating for the partial overlap of translated
// filters with a group's patch: k_m[dr][dc] is the l2 norm of d_m restricted
// to rows [dr, fh) and columns [dc, fw), the part of the filter placed at
// p - (dr, dc) that lies inside the patch anchored at p.  Requires a
// normalized dictionary, so k_m[0][0] == 1.
GroupKernels stripe_weight_kernels(const Dictionary& d);

}  // namespace csc
