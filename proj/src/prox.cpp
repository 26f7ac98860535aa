#include "csc/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csc/error.hpp"

namespace csc {

namespace {

void check_tau(double tau, const char* op) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument(std::string(op) + ": tau must be finite and >= 0, got " +
                          std::to_string(tau));
  }
}

// Empty means unit weights.  `strict` requires w > 0, otherwise w >= 0.
void check_weights(std::span<const double> w, std::size_t n, bool strict, const char* op) {
  if (w.empty()) return;
  if (w.size() != n) throw DimensionError(std::string(op) + ": weight count does not match operand");
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0 || (strict && x == 0.0)) {
      throw InvalidArgument(std::string(op) + (strict ? ": weights must be > 0" : ": weights must be >= 0"));
    }
  }
}

// Indices ordered by decreasing key, ties by index.
std::vector<std::size_t> order_descending(const std::vector<double>& key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return idx;
}

}  // namespace

void prox_weighted_l1(std::span<const double> v, double tau, std::span<const double> w,
                      std::span<double> out) {
  check_tau(tau, "prox_weighted_l1");
  check_weights(w, v.size(), false, "prox_weighted_l1");
  if (out.size() != v.size()) throw DimensionError("prox_weighted_l1: output length mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = w.empty() ? tau : tau * w[i];
    const double a = std::abs(v[i]) - t;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
}

std::vector<double> prox_weighted_l1(std::span<const double> v, double tau,
                                     std::span<const double> w) {
  std::vector<double> out(v.size());
  prox_weighted_l1(v, tau, w, out);
  return out;
}

std::vector<double> project_nonneg(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
  return out;
}

std::vector<double> project_simplex(std::span<const double> v, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("project_simplex: radius must be positive");
  }
  if (v.empty()) throw DimensionError("project_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - radius) / double(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

// Solves sum_i (w_i v_i - t)_+ / w_i^2 = tau, which is the simplex condition
// on the multipliers of the active (clamped) entries.
double prox_max_threshold(std::span<const double> v, double tau, std::span<const double> w) {
  check_tau(tau, "prox_max");
  check_weights(w, v.size(), true, "prox_max");
  if (tau == 0.0 || v.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> key(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) key[i] = w.empty() ? v[i] : w[i] * v[i];
  const auto idx = order_descending(key);
  double s1 = 0.0;  // sum of v_i / w_i over the active set
  double s2 = 0.0;  // sum of 1 / w_i^2
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    const double wi = w.empty() ? 1.0 : w[i];
    s1 += key[i] / (wi * wi);
    s2 += 1.0 / (wi * wi);
    const double t = (s1 - tau) / s2;
    if (k + 1 == idx.size() || t >= key[idx[k + 1]]) return t;
  }
  return std::numeric_limits<double>::infinity();  // unreachable
}

std::vector<double> prox_max(std::span<const double> v, double tau, std::span<const double> w) {
  check_tau(tau, "prox_max");
  check_weights(w, v.size(), true, "prox_max");
  std::vector<double> out(v.begin(), v.end());
  if (tau == 0.0 || v.empty()) return out;
  if (w.empty()) {
    // Moreau: prox_{tau max}(v) = v - tau P_simplex(v / tau).
    std::vector<double> scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = v[i] / tau;
    const auto p = project_simplex(scaled, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - tau * p[i];
    return out;
  }
  const double t = prox_max_threshold(v, tau, w);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::min(v[i], t / w[i]);
  return out;
}

std::vector<double> prox_l2(std::span<const double> v, double tau, std::span<const double> w) {
  check_tau(tau, "prox_l2");
  check_weights(w, v.size(), true, "prox_l2");
  std::vector<double> out(v.size(), 0.0);
  if (tau == 0.0) {
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }
  if (w.empty()) {
    const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (n <= tau) return out;
    const double scale = 1.0 - tau / n;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
    return out;
  }

  // 0 is optimal iff v lies in tau * {g : sum g_i^2 / w_i <= 1}.
  double dual = 0.0;
  double primal = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dual += v[i] * v[i] / w[i];
    primal += w[i] * v[i] * v[i];
  }
  if (dual <= tau * tau) return out;

  // Otherwise x_i = v_i r / (r + tau w_i) where r = f(x) solves
  // psi(r) = sum_i w_i v_i^2 / (r + tau w_i)^2 = 1 on (0, f(v)].  psi is
  // convex and decreasing, so Newton from the left never overshoots; the
  // bracket guards against rounding.
  auto psi = [&](double r, double& slope) {
    double val = 0.0;
    slope = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = r + tau * w[i];
      const double q = w[i] * v[i] * v[i] / (d * d);
      val += q;
      slope -= 2.0 * q / d;
    }
    return val - 1.0;
  };
  double lo = 0.0;
  double hi = std::sqrt(primal);
  double r = lo;
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double f = psi(r, slope);
    if (f > 0.0) {
      lo = r;
    } else {
      hi = r;
    }
    if (f == 0.0) break;
    double next = r - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - r);
    r = next;
    if (step <= 1e-12 * std::max(1.0, r)) break;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * r / (r + tau * w[i]);
  return out;
}

}  // namespace csc
