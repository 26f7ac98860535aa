#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csc/pipeline.hpp"

namespace csc {

// A benchmark row: "omp", or a penalty with an optional weighting after a
// colon, e.g. "l1", "l1:l1corr", "l1inf:group+inner".
struct MethodSpec {
  std::string name;
  bool omp = false;
  PenaltyKind kind = PenaltyKind::L1;
  Weighting weighting = Weighting::None;
};

MethodSpec parse_method(const std::string& s);
// l1, l12, l1inf, then their weighted forms, then omp.
std::vector<MethodSpec> default_methods();

struct BenchmarkImage {
  std::string name;
  Image reference;
};

struct BenchmarkConfig {
  double sigma = 0.05;
  std::uint64_t seed = 1;  // image i is corrupted with seed + i
  int grid_count = 16;
  std::vector<double> grid;  // shared explicit grid; empty: default_grid per method
  DenoiseConfig base;        // solver overrides, algorithm, lowpass, activity
  OmpConfig omp;
  std::size_t omp_atoms_per_dim = 12;
  std::optional<Shape> block;  // default: the dictionary filter shape
  std::size_t threads = 0;     // 0: worker_threads(0)
};

struct BenchmarkCell {
  std::string method;
  std::string image;
  std::optional<double> lambda;  // unset for omp
  double psnr = 0.0;
  int iterations = 0;
  double rho = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double wall_seconds = 0.0;
  std::vector<GridPoint> grid;
  Image denoised;
  std::vector<BlockErrorRecord> block_errors;
};

struct BenchmarkResult {
  std::vector<std::string> methods;
  std::vector<std::string> images;
  std::vector<Image> noisy;
  std::vector<double> noisy_psnr;
  std::vector<std::vector<BlockErrorRecord>> noisy_block_errors;
  std::vector<BenchmarkCell> cells;  // method-major

  const BenchmarkCell& cell(std::size_t method, std::size_t image) const {
    return cells[method * images.size() + image];
  }
};

// Worker count: `requested` if nonzero, else the hardware concurrency,
// capped by the CSC_THREADS environment variable when it is set.
std::size_t worker_threads(std::size_t requested);

// Runs every (method, image) pair on a worker pool; results do not depend
// on the thread count.
BenchmarkResult run_benchmark(const std::vector<BenchmarkImage>& images, const Dictionary& d,
                              const std::vector<MethodSpec>& methods, const BenchmarkConfig& cfg);

// Methods x images PSNR table with a leading "noisy" row.
std::string table_csv(const BenchmarkResult& r);
// One row per cell: method, image, lambda, rho, alpha0, alpha1, iterations, psnr.
std::string metrics_csv(const BenchmarkResult& r);
std::string timings_csv(const BenchmarkResult& r);
std::string grid_csv(const BenchmarkResult& r);
std::string block_error_csv(const BenchmarkResult& r, std::size_t image);
std::string block_error_svg(const BenchmarkResult& r, std::size_t image);

// Writes the CSVs, SVGs and CIMG1 images into `dir`; returns the paths.
std::vector<std::filesystem::path> write_benchmark(const BenchmarkResult& r,
                                                   const std::filesystem::path& dir);

}  // namespace csc
