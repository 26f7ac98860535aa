#pragma once

#include <span>
#include <vector>

namespace csc {

// Proximal operators prox_f(v) = argmin_x f(x) + 1/2 ||x - v||^2.
// An empty weight span means unit weights throughout.

// sign(v_i) max(|v_i| - tau w_i, 0).
std::vector<double> prox_weighted_l1(std::span<const double> v, double tau,
                                     std::span<const double> w = {});
void prox_weighted_l1(std::span<const double> v, double tau, std::span<const double> w,
                      std::span<double> out);

std::vector<double> project_nonneg(std::span<const double> v);

// Euclidean projection onto {z >= 0, sum z = radius}.
std::vector<double> project_simplex(std::span<const double> v, double radius);

// f(x) = max_i w_i x_i.  The solution clamps every entry to min(v_i, t / w_i)
// for a single threshold t.
std::vector<double> prox_max(std::span<const double> v, double tau, std::span<const double> w = {});

// Threshold t of the weighted max prox (entries with w_i v_i > t are clamped
// to t / w_i).  Returns +inf when tau == 0.
double prox_max_threshold(std::span<const double> v, double tau, std::span<const double> w = {});

// f(x) = sqrt(sum_i w_i x_i^2).
std::vector<double> prox_l2(std::span<const double> v, double tau, std::span<const double> w = {});

}  // namespace csc
