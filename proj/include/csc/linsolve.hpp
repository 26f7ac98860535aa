#pragma once

#include <span>
#include <vector>

#include "csc/fft.hpp"

namespace csc {

// Per-frequency solvers for identity-plus-low-rank systems.  A row vector a
// acts on x as a^T x = sum_m a_m x_m; its adjoint is conj(a).  These are the
// operators produced by diagonalizing sums of convolutions in the DFT domain.

// Solves (sigma I + conj(a) a^T) x = rhs.
void solve_rank1(std::span<const cplx> a, double sigma, std::span<const cplx> rhs,
                 std::span<cplx> x);
std::vector<cplx> solve_rank1(std::span<const cplx> a, double sigma, std::span<const cplx> rhs);

// Solves (sigma I + c_a conj(a) a^T + c_b conj(b) b^T) x = rhs by two nested
// Sherman-Morrison steps, eliminating the a term first.
void solve_rank2(std::span<const cplx> a, std::span<const cplx> b, double sigma, double c_a,
                 double c_b, std::span<const cplx> rhs, std::span<cplx> x);
std::vector<cplx> solve_rank2(std::span<const cplx> a, std::span<const cplx> b, double sigma,
                              double c_a, double c_b, std::span<const cplx> rhs);

// Many solves of one rank-2 family, one system per frequency: a and b are
// frequency-major tables (`width` entries per frequency).  Factors shared by
// every right-hand side are computed once; results match solve_rank2.
class Rank2Factors {
public:
  Rank2Factors(std::vector<cplx> a, std::vector<cplx> b, std::size_t width, double sigma,
               double c_a, double c_b);

  std::size_t width() const { return width_; }
  std::size_t num_frequencies() const { return denom_a_.size(); }
  void solve(std::size_t k, std::span<const cplx> rhs, std::span<cplx> x) const;

private:
  std::vector<cplx> a_, b_, z_;
  std::vector<double> denom_a_;
  std::vector<cplx> denom_b_;
  std::size_t width_;
  double sigma_, c_a_, c_b_;
};

}  // namespace csc
