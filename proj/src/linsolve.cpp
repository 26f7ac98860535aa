#include "csc/linsolve.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "csc/error.hpp"

namespace csc {

namespace {

constexpr double kTinyDenominator = 1e-300;

void check_sizes(std::size_t n, std::size_t rhs, std::size_t x) {
  if (rhs != n || x != n) throw DimensionError("linear solve: vector lengths disagree");
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("linear solve: sigma must be positive, got " + std::to_string(sigma));
  }
}

// a^T v
cplx apply_row(std::span<const cplx> a, std::span<const cplx> v) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * v[i];
  return s;
}

double sq_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return s;
}

// x = (sigma I + c conj(a) a^T)^{-1} rhs; x may alias rhs.
void sherman_morrison(std::span<const cplx> a, double sigma, double c, std::span<const cplx> rhs,
                      std::span<cplx> x) {
  const double denom = sigma + c * sq_norm(a);
  if (std::abs(denom) < kTinyDenominator) {
    throw ConditioningError("Sherman-Morrison denominator vanished");
  }
  const cplx beta = c * apply_row(a, rhs) / denom;
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = (rhs[i] - std::conj(a[i]) * beta) / sigma;
}

}  // namespace

void solve_rank1(std::span<const cplx> a, double sigma, std::span<const cplx> rhs,
                 std::span<cplx> x) {
  check_sizes(a.size(), rhs.size(), x.size());
  check_sigma(sigma);
  sherman_morrison(a, sigma, 1.0, rhs, x);
}

std::vector<cplx> solve_rank1(std::span<const cplx> a, double sigma, std::span<const cplx> rhs) {
  std::vector<cplx> x(a.size());
  solve_rank1(a, sigma, rhs, x);
  return x;
}

// With B = sigma I + c_a conj(a) a^T,
//   (B + c_b conj(b) b^T)^{-1} r = B^{-1} r - c_b B^{-1}conj(b) (b^T B^{-1} r) / (1 + c_b b^T B^{-1} conj(b)).
void solve_rank2(std::span<const cplx> a, std::span<const cplx> b, double sigma, double c_a,
                 double c_b, std::span<const cplx> rhs, std::span<cplx> x) {
  check_sizes(a.size(), rhs.size(), x.size());
  if (b.size() != a.size()) throw DimensionError("solve_rank2: a and b lengths disagree");
  check_sigma(sigma);
  if (c_a < 0.0 || c_b < 0.0) throw InvalidArgument("solve_rank2: coefficients must be >= 0");
  if (c_a == 0.0) {
    sherman_morrison(b, sigma, c_b, rhs, x);
    return;
  }
  sherman_morrison(a, sigma, c_a, rhs, x);
  if (c_b == 0.0) return;

  std::vector<cplx> bc(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) bc[i] = std::conj(b[i]);
  std::vector<cplx> z(b.size());
  sherman_morrison(a, sigma, c_a, bc, z);
  const cplx denom = 1.0 + c_b * apply_row(b, z);
  if (std::abs(denom) < kTinyDenominator) {
    throw ConditioningError("iterated Sherman-Morrison denominator vanished");
  }
  const cplx beta = c_b * apply_row(b, x) / denom;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= z[i] * beta;
}

std::vector<cplx> solve_rank2(std::span<const cplx> a, std::span<const cplx> b, double sigma,
                              double c_a, double c_b, std::span<const cplx> rhs) {
  std::vector<cplx> x(a.size());
  solve_rank2(a, b, sigma, c_a, c_b, rhs, x);
  return x;
}

Rank2Factors::Rank2Factors(std::vector<cplx> a, std::vector<cplx> b, std::size_t width,
                           double sigma, double c_a, double c_b)
    : a_(std::move(a)), b_(std::move(b)), width_(width), sigma_(sigma), c_a_(c_a), c_b_(c_b) {
  check_sigma(sigma);
  if (c_a < 0.0 || c_b < 0.0) throw InvalidArgument("Rank2Factors: coefficients must be >= 0");
  if (width == 0 || a_.size() % width != 0 || b_.size() != a_.size()) {
    throw DimensionError("Rank2Factors: table sizes disagree");
  }
  const std::size_t nk = a_.size() / width;
  denom_a_.resize(nk);
  denom_b_.resize(nk);
  z_.resize(a_.size());
  std::vector<cplx> bc(width);
  for (std::size_t k = 0; k < nk; ++k) {
    const std::span<const cplx> ak(a_.data() + k * width, width);
    const std::span<const cplx> bk(b_.data() + k * width, width);
    const std::span<cplx> zk(z_.data() + k * width, width);
    denom_a_[k] = sigma + c_a * sq_norm(ak);
    if (denom_a_[k] < kTinyDenominator) throw ConditioningError("Rank2Factors: singular a term");
    for (std::size_t i = 0; i < width; ++i) bc[i] = std::conj(bk[i]);
    sherman_morrison(ak, sigma, c_a, bc, zk);
    denom_b_[k] = 1.0 + c_b * apply_row(bk, zk);
    if (std::abs(denom_b_[k]) < kTinyDenominator) {
      throw ConditioningError("Rank2Factors: singular b term");
    }
  }
}

void Rank2Factors::solve(std::size_t k, std::span<const cplx> rhs, std::span<cplx> x) const {
  const std::span<const cplx> ak(a_.data() + k * width_, width_);
  const std::span<const cplx> bk(b_.data() + k * width_, width_);
  const cplx* zk = z_.data() + k * width_;
  const cplx alpha = c_a_ * apply_row(ak, rhs) / denom_a_[k];
  for (std::size_t i = 0; i < width_; ++i) x[i] = (rhs[i] - std::conj(ak[i]) * alpha) / sigma_;
  if (c_b_ == 0.0) return;
  const cplx beta = c_b_ * apply_row(bk, x) / denom_b_[k];
  for (std::size_t i = 0; i < width_; ++i) x[i] -= zk[i] * beta;
}

}  // namespace csc
