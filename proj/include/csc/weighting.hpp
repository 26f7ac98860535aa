#pragma once

#include <string>
#include <vector>

#include "csc/array.hpp"

namespace csc {

enum class ActivitySource {
  Analysis,     // group sums of the squared analysis maps (D^T s)_m^2
  ImageEnergy,  // local energy of the signal over each group's window
};

std::string to_string(ActivitySource a);
ActivitySource parse_activity_source(const std::string& s);

inline constexpr double kDefaultWeightEps = 1e-5;

// Per-group weights w_p = 1 / (a_p + eps_rel max(a)), rescaled to unit mean,
// where a_p is the activity of the group anchored at p (unit h x w box
// summed as for the group operator).  A zero signal yields all ones.
Image group_weights_from_activity(const Dictionary& d, const Image& s_highpass,
                                  ActivitySource source = ActivitySource::Analysis,
                                  double eps_rel = kDefaultWeightEps);

// Per-coefficient weights 1 / ((D^T s)^2 + eps_rel max((D^T s)^2)), rescaled
// to unit mean.  A zero signal yields all ones.
CoefficientMaps l1_weights_from_correlation(const Dictionary& d, const Image& s_highpass,
                                            double eps_rel = kDefaultWeightEps);

// Stacks maps vertically into one (M*h) x w image for CIMG1 export.
Image stack_maps(const CoefficientMaps& x);

}  // namespace csc
