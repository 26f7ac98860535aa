#include "csc/weighting.hpp"

#include <algorithm>
#include <cmath>

#include "csc/error.hpp"
#include "csc/groups.hpp"
#include "csc/signal.hpp"

namespace csc {

std::string to_string(ActivitySource a) {
  return a == ActivitySource::Analysis ? "analysis" : "image_energy";
}

ActivitySource parse_activity_source(const std::string& s) {
  if (s == "analysis") return ActivitySource::Analysis;
  if (s == "image_energy") return ActivitySource::ImageEnergy;
  throw InvalidArgument("unknown activity source '" + s + "' (expected analysis or image_energy)");
}

namespace {

void check_eps(double eps_rel) {
  if (!(eps_rel > 0.0) || !std::isfinite(eps_rel)) {
    throw InvalidArgument("eps_rel must be positive");
  }
}

// 1 / (a + eps max a), unit mean; all ones when a vanishes.
std::vector<double> inverse_unit_mean(std::vector<double> a, double eps_rel) {
  for (double& v : a) v = std::max(v, 0.0);  // FFT rounding
  const double amax = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  if (!(amax > 0.0)) return std::vector<double>(a.size(), 1.0);
  const double floor = eps_rel * amax;
  double sum = 0.0;
  for (double& v : a) {
    v = 1.0 / (v + floor);
    sum += v;
  }
  const double mean = sum / double(a.size());
  for (double& v : a) v /= mean;
  return a;
}

}  // namespace

Image group_weights_from_activity(const Dictionary& d, const Image& s_highpass,
                                  ActivitySource source, double eps_rel) {
  check_eps(eps_rel);
  const Shape shape = s_highpass.shape();
  Image activity;
  if (source == ActivitySource::Analysis) {
    CoefficientMaps c = apply_dictionary_adjoint(d, s_highpass);
    for (double& v : c.values()) v = v * v;
    const GroupOperator g(GroupKernels::unit(d.filter_shape(), d.num_filters()), shape);
    activity = group_sums(g, c, false);
  } else {
    CoefficientMaps e(1, shape.height, shape.width);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double v = s_highpass.values()[i];
      e.values()[i] = v * v;
    }
    const GroupOperator g(GroupKernels::unit(d.filter_shape(), 1), shape);
    activity = group_sums(g, e, false);
  }
  auto w = inverse_unit_mean(std::vector<double>(activity.values().begin(), activity.values().end()),
                             eps_rel);
  return Image(shape.height, shape.width, std::move(w));
}

CoefficientMaps l1_weights_from_correlation(const Dictionary& d, const Image& s_highpass,
                                            double eps_rel) {
  check_eps(eps_rel);
  const CoefficientMaps c = apply_dictionary_adjoint(d, s_highpass);
  std::vector<double> sq(c.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = c.values()[i] * c.values()[i];
  return CoefficientMaps(c.num_maps(), c.height(), c.width(), inverse_unit_mean(std::move(sq), eps_rel));
}

Image stack_maps(const CoefficientMaps& x) {
  std::vector<double> v(x.values().begin(), x.values().end());
  return Image(x.num_maps() * x.height(), x.width(), std::move(v));
}

}  // namespace csc
