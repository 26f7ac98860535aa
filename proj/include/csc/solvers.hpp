#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csc/array.hpp"
#include "csc/groups.hpp"

namespace csc {

enum class PenaltyKind { L1, L1Inf, L12 };
enum class OuterNorm { Max, L2 };
enum class MixedAlgorithm { Nested, Nonneg };

std::string to_string(PenaltyKind k);
PenaltyKind parse_penalty_kind(const std::string& s);
std::string to_string(MixedAlgorithm a);
MixedAlgorithm parse_mixed_algorithm(const std::string& s);

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.0;
  // L1: one weight per coefficient (map-major); empty means unit.
  std::vector<double> l1_weights;
  // L1Inf / L12: one weight per group (spatial location); empty means unit.
  std::vector<double> group_weights;
  // L1Inf / L12: inner-norm kernels; unset means unit kernels.
  std::optional<GroupKernels> inner_kernels;
};

struct InnerConfig {
  int max_iter = 100;
  double rel_tol = 1e-4;  // relative change of the inner functional
  bool warm_start = true;
  // Inner penalty is rho * tau when scale_with_tau is set, else rho.
  double rho = 1.0;
  bool scale_with_tau = true;
};

struct AdmmConfig {
  double rho = 1.0;
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  int max_iter = 250;
  double eps_abs = 0.0;
  double eps_rel = 1e-4;
  // Run exactly max_iter iterations, ignoring the residual test.
  bool fixed_iterations = false;
  bool residual_balancing = false;
  double rb_mu = 10.0;
  double rb_tau = 2.0;
  InnerConfig inner;

  // l1: rho = 50 lambda + 1 with residual balancing, 250 iterations.
  // l1,inf: rho = 0.05 lambda, alpha0 = 0.06; l1,2: rho = 3 lambda,
  // alpha0 = 0.03; both alpha1 = 1 / alpha0 and 350 iterations.
  static AdmmConfig defaults(PenaltyKind kind, double lambda);
};

struct SolveResult {
  CoefficientMaps x;
  int iterations = 0;
  bool converged = false;
  // Per-iteration history, evaluated at the x-update iterate.
  std::vector<double> functional;
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  std::vector<double> rho;
  // Objective at the returned x.
  double final_functional = 0.0;
  double wall_seconds = 0.0;
  // Nested solver: inner solves that hit their iteration cap.
  int inner_cap_hits = 0;
  // Non-negative mapped solver: the two halves with x = x0 - x1.
  std::optional<CoefficientMaps> positive_part;
  std::optional<CoefficientMaps> negative_part;
};

// 1/2 ||D x - s||^2 + lambda * penalty(x) for the given spec.
double csc_functional(const Dictionary& d, const Image& s, const PenaltySpec& p,
                      const CoefficientMaps& x);

SolveResult solve_csc_l1(const Dictionary& d, const Image& s, const PenaltySpec& p,
                         const AdmmConfig& c);
SolveResult solve_csc_mixed_nested(const Dictionary& d, const Image& s, const PenaltySpec& p,
                                   const AdmmConfig& c);
SolveResult solve_csc_mixed_nonneg(const Dictionary& d, const Image& s, const PenaltySpec& p,
                                   const AdmmConfig& c);
// Dispatch on p.kind; `algorithm` selects the mixed-norm method.
SolveResult solve_csc(const Dictionary& d, const Image& s, const PenaltySpec& p,
                      const AdmmConfig& c, MixedAlgorithm algorithm = MixedAlgorithm::Nonneg);

// Split and dual variables of the inner solver, reused across calls when
// warm starting.
struct InnerState {
  Image y0, u0;
  CoefficientMaps y1, u1;
  bool valid = false;
};

struct ProxGroupsResult {
  CoefficientMaps x;
  int iterations = 0;
  bool converged = false;  // false: cap reached before the tolerance
  double functional = 0.0;
};

// argmin_x tau f(G|x|) + 1/2 ||x - v||^2 with f = (weighted) max or l2,
// solved on |v| by an inner ADMM and signed back.  Uses c.alpha0, c.alpha1
// and c.inner.
ProxGroupsResult prox_max_groups(const GroupOperator& g, const CoefficientMaps& v, double tau,
                                 OuterNorm outer, std::span<const double> group_weights,
                                 const AdmmConfig& c, InnerState* warm = nullptr);

}  // namespace csc
