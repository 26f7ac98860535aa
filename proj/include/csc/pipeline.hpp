#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csc/array.hpp"
#include "csc/solvers.hpp"
#include "csc/weighting.hpp"

namespace csc {

enum class Weighting {
  None,
  Group,       // outer norm weights from local activity
  Inner,       // stripe-normalizing inner kernels
  GroupInner,  // both
  L1Corr,      // l1 weights from the squared analysis correlation
};

std::string to_string(Weighting w);
Weighting parse_weighting(const std::string& s);

inline constexpr double kDefaultLowpassLambda = 2.0;

// Adjustments applied on top of AdmmConfig::defaults(kind, lambda).  Solves
// run a fixed number of iterations unless tolerance_mode is set.
struct SolverOverrides {
  std::optional<double> rho_per_lambda;  // rho = value * lambda
  std::optional<double> alpha0;
  std::optional<double> alpha1;  // unset: 1 / alpha0
  std::optional<int> max_iter;
  std::optional<bool> residual_balancing;
  bool tolerance_mode = false;
  double eps_rel = 1e-4;
  InnerConfig inner;
};

struct DenoiseConfig {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.05;
  SolverOverrides solver;
  MixedAlgorithm algorithm = MixedAlgorithm::Nonneg;
  double lowpass_lambda = kDefaultLowpassLambda;
  Weighting weighting = Weighting::None;
  ActivitySource activity = ActivitySource::Analysis;
  double weight_eps = kDefaultWeightEps;
};

// Solver settings used by denoise_csc for a given config and lambda.
AdmmConfig resolve_admm(const DenoiseConfig& cfg, double lambda);
// Penalty (with weights) used by denoise_csc on the given highpass signal.
PenaltySpec build_penalty(const Dictionary& d, const Image& highpass, const DenoiseConfig& cfg,
                          double lambda);

struct DenoiseResult {
  Image denoised;
  Image lowpass;
  Image highpass;        // of the noisy input
  Image reconstruction;  // D x, the denoised highpass
  SolveResult solve;
};

// Lowpass split, sparse code the highpass, add the lowpass back.
DenoiseResult denoise_csc(const Image& noisy, const Dictionary& d, const DenoiseConfig& cfg);

// `count` points log-spaced over [lo, hi], strictly increasing.
std::vector<double> log_grid(double lo, double hi, int count);

// Default grid: 16 points over [1e-2, 1] * (sigma / 0.05) * grid_scale.
std::vector<double> default_grid(PenaltyKind kind, Weighting weighting, double sigma,
                                 Shape image_shape, Shape filter_shape, int count = 16);
// Where each penalty's optimal lambda sits relative to plain l1: the max
// term of l1,inf grows with the image area, the l1,2 term with its square
// root, and unit-mean l1corr weights are mostly far below 1.
double grid_scale(PenaltyKind kind, Weighting weighting, Shape image_shape, Shape filter_shape);

struct GridPoint {
  double lambda = 0.0;
  double psnr = 0.0;
  int iterations = 0;
  double functional = 0.0;
};

struct GridSearchResult {
  double best_lambda = 0.0;
  double best_psnr = 0.0;
  std::vector<GridPoint> table;
  DenoiseResult best;
};

// Ties go to the smaller lambda.
GridSearchResult lambda_grid_search(const Image& noisy, const Image& reference,
                                    const Dictionary& d, const DenoiseConfig& cfg,
                                    const std::vector<double>& grid);

struct BlockErrorRecord {
  std::size_t row = 0;
  std::size_t col = 0;
  double reference_norm = 0.0;
  double error = 0.0;
  std::string method;
};

// One record per block position, stride 1, circular wrap.
std::vector<BlockErrorRecord> block_error_scatter(const Image& reference_hp, const Image& test_hp,
                                                  Shape block, const std::string& method = "");

// Mean block error over the blocks whose reference norm is in the top
// `fraction` (0.1 = top decile).
double top_fraction_mean_error(const std::vector<BlockErrorRecord>& records, double fraction);

// Patch dictionary for the OMP baseline: atoms are columns of length
// patch.size(), stored atom-major, unit norm.
struct PatchDictionary {
  Shape patch;
  std::size_t num_atoms = 0;
  std::vector<double> atoms;

  std::span<const double> atom(std::size_t j) const {
    return {atoms.data() + j * patch.size(), patch.size()};
  }
};

// Separable overcomplete DCT (atoms_per_dim^2 atoms), the usual starting
// dictionary for K-SVD denoising.
PatchDictionary overcomplete_dct(Shape patch, std::size_t atoms_per_dim);

struct OmpConfig {
  double error_constant = 1.15;
  std::size_t max_atoms = 0;  // 0: patch size / 2
  double lowpass_lambda = kDefaultLowpassLambda;
};

struct SparseCode {
  std::vector<std::size_t> support;
  std::vector<double> coefficients;
  double residual_norm = 0.0;
};

// Greedy OMP until ||residual|| <= threshold or max_atoms atoms are used.
SparseCode omp_code(const PatchDictionary& dict, std::span<const double> signal, double threshold,
                    std::size_t max_atoms);

// Patch-based baseline: OMP-code every stride-1 patch of the highpass with
// threshold C sigma sqrt(patch size), average overlapping patches, add the
// lowpass back.
Image denoise_omp(const Image& noisy, const PatchDictionary& dict, double sigma,
                  const OmpConfig& cfg = {});

}  // namespace csc
