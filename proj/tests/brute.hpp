#pragma once

// Slow reference implementations used as oracles.  None of them call into
// the library's solvers.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "csc/array.hpp"

namespace brute {

using cplx = std::complex<double>;

// (sigma I + c_a conj(a) a^T + c_b conj(b) b^T) x = rhs, dense LU.
inline std::vector<cplx> dense_solve(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                     double sigma, double c_a, double c_b,
                                     const std::vector<cplx>& rhs) {
  const Eigen::Index n = Eigen::Index(a.size());
  Eigen::MatrixXcd m = sigma * Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) += c_a * std::conj(a[i]) * a[j];
      if (!b.empty()) m(i, j) += c_b * std::conj(b[i]) * b[j];
    }
  }
  Eigen::VectorXcd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = rhs[i];
  const Eigen::VectorXcd x = m.fullPivLu().solve(r);
  return std::vector<cplx>(x.data(), x.data() + n);
}

// Euclidean projection of y onto conv{p_i e_i} by enumerating every face.
// For each support S, project onto the affine hull of its vertices via the
// KKT system and keep the nearest candidate with nonnegative barycentric
// coordinates.
inline std::vector<double> project_hull(const std::vector<double>& y,
                                        const std::vector<double>& p) {
  const std::size_t n = y.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> out(n, 0.0);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    const Eigen::Index k = Eigen::Index(s.size());
    // min sum_{i in S} (p_i mu_i - y_i)^2 + sum_{i not in S} y_i^2, sum mu = 1
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index j = 0; j < k; ++j) {
      kkt(j, j) = p[s[j]] * p[s[j]];
      kkt(j, k) = 1.0;
      kkt(k, j) = 1.0;
      rhs(j) = p[s[j]] * y[s[j]];
    }
    rhs(k) = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    bool feasible = true;
    for (Eigen::Index j = 0; j < k; ++j) feasible = feasible && sol(j) >= -1e-13;
    if (!feasible) continue;
    std::vector<double> z(n, 0.0);
    for (Eigen::Index j = 0; j < k; ++j) z[s[j]] = p[s[j]] * std::max(sol(j), 0.0);
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += (z[i] - y[i]) * (z[i] - y[i]);
    if (dist < best) {
      best = dist;
      out = z;
    }
  }
  return out;
}

inline std::vector<double> simplex(const std::vector<double>& v, double radius) {
  std::vector<double> y(v.size()), p(v.size(), 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) y[i] = v[i] / radius;
  auto z = project_hull(y, p);
  for (double& x : z) x *= radius;
  return z;
}

// prox of tau max_i w_i x_i: v - tau P_C(v / tau), C = conv{w_i e_i} being
// the subdifferential at zero.
inline std::vector<double> prox_max(const std::vector<double>& v, double tau,
                                    const std::vector<double>& w) {
  std::vector<double> y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) y[i] = v[i] / tau;
  const auto z = project_hull(y, w);
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] - tau * z[i];
  return x;
}

// Golden-section minimization of a convex scalar function on [lo, hi].
template <class F>
double minimize_scalar(F f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// prox of tau sqrt(sum w x^2) through sqrt(a) = min_mu a / (2 mu) + mu / 2.
// For fixed mu the minimizer is x = v / (1 + tau w / mu); the remaining
// objective is convex in mu and minimized by golden section.
inline std::vector<double> prox_l2(const std::vector<double>& v, double tau,
                                   const std::vector<double>& w) {
  double dual = 0.0, primal = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dual += v[i] * v[i] / w[i];
    primal += w[i] * v[i] * v[i];
  }
  if (dual <= tau * tau) return std::vector<double>(v.size(), 0.0);
  auto at = [&](double mu) {
    std::vector<double> x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] / (1.0 + tau * w[i] / mu);
    return x;
  };
  auto obj = [&](double mu) {
    const auto x = at(mu);
    double a = 0.0, q = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      a += w[i] * x[i] * x[i];
      q += 0.5 * (x[i] - v[i]) * (x[i] - v[i]);
    }
    return tau * (a / (2.0 * mu) + mu / 2.0) + q;
  };
  return at(minimize_scalar(obj, 0.0, std::sqrt(primal)));
}

// Minimizer of a convex scalar function on [lo, hi] given its right
// derivative: the smallest z with dright(z) >= 0, by bisection.
template <class F>
double minimize_by_derivative(F dright, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (dright(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// Group sums by explicit enumeration: the group at p holds every
// coefficient (m, q) whose filter placement [q, q + h) x [q, q + w) covers
// pixel p, with circular wrap.
inline csc::Image stripe_group_sums(const csc::CoefficientMaps& x, csc::Shape filter,
                                    bool absolute) {
  const std::size_t hh = x.height(), ww = x.width();
  csc::Image out(hh, ww);
  auto covers = [](std::size_t q, std::size_t p, std::size_t len, std::size_t n) {
    return (p + n - q) % n < len;
  };
  for (std::size_t pr = 0; pr < hh; ++pr)
    for (std::size_t pc = 0; pc < ww; ++pc)
      for (std::size_t m = 0; m < x.num_maps(); ++m)
        for (std::size_t qr = 0; qr < hh; ++qr)
          for (std::size_t qc = 0; qc < ww; ++qc)
            if (covers(qr, pr, filter.height, hh) && covers(qc, pc, filter.width, ww)) {
              const double v = x(m, qr, qc);
              out(pr, pc) += absolute ? std::abs(v) : v;
            }
  return out;
}

}  // namespace brute
