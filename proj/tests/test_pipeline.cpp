#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "csc/error.hpp"
#include "csc/pipeline.hpp"
#include "csc/signal.hpp"
#include "csc/synth.hpp"
#include "support.hpp"

using namespace csc;

namespace {

struct Scene {
  Image reference, noisy;
  Dictionary dict;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene out;
    out.reference = synth::test_image("shapes", {64, 64});
    out.noisy = add_gaussian_noise(out.reference, {0.05, 1});
    out.dict = synth::dictionary("gabor", {8, 8}, 32);
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("weighting names") {
  for (auto w : {Weighting::None, Weighting::Group, Weighting::Inner, Weighting::GroupInner,
                 Weighting::L1Corr}) {
    CHECK(parse_weighting(to_string(w)) == w);
  }
  CHECK(parse_weighting("group_inner") == Weighting::GroupInner);
  CHECK_THROWS_AS(parse_weighting("bogus"), InvalidArgument);
}

TEST_CASE("solver resolution") {
  DenoiseConfig cfg;
  cfg.kind = PenaltyKind::L1Inf;
  auto c = resolve_admm(cfg, 2.0);
  CHECK(c.rho == doctest::Approx(0.1));
  CHECK(c.fixed_iterations);
  CHECK(c.max_iter == 350);
  cfg.solver.rho_per_lambda = 0.5;
  cfg.solver.alpha0 = 0.1;
  cfg.solver.max_iter = 12;
  cfg.solver.tolerance_mode = true;
  c = resolve_admm(cfg, 2.0);
  CHECK(c.rho == doctest::Approx(1.0));
  CHECK(c.alpha1 == doctest::Approx(10.0));
  CHECK(c.max_iter == 12);
  CHECK(!c.fixed_iterations);
  cfg.solver.alpha1 = 3.0;
  CHECK(resolve_admm(cfg, 2.0).alpha1 == 3.0);
  CHECK(resolve_admm(cfg, 0.0).rho > 0.0);
}

TEST_CASE("penalty construction") {
  std::mt19937_64 rng(1);
  const auto d = testing::random_dictionary(rng, 3, 3, 4);
  const auto hp = testing::random_image(rng, 10, 10);
  DenoiseConfig cfg;
  cfg.weighting = Weighting::L1Corr;
  auto p = build_penalty(d, hp, cfg, 0.3);
  CHECK(p.lambda == 0.3);
  CHECK(p.l1_weights.size() == 400);
  CHECK(p.group_weights.empty());
  cfg.weighting = Weighting::Group;
  CHECK_THROWS_AS(build_penalty(d, hp, cfg, 0.3), InvalidArgument);
  cfg.kind = PenaltyKind::L12;
  p = build_penalty(d, hp, cfg, 0.3);
  CHECK(p.group_weights.size() == 100);
  CHECK(!p.inner_kernels.has_value());
  cfg.weighting = Weighting::Inner;
  p = build_penalty(d, hp, cfg, 0.3);
  CHECK(p.group_weights.empty());
  REQUIRE(p.inner_kernels.has_value());
  CHECK(p.inner_kernels->values == stripe_weight_kernels(d).values);
  cfg.weighting = Weighting::GroupInner;
  p = build_penalty(d, hp, cfg, 0.3);
  CHECK(p.group_weights.size() == 100);
  CHECK(p.inner_kernels.has_value());
  cfg.weighting = Weighting::L1Corr;
  CHECK_THROWS_AS(build_penalty(d, hp, cfg, 0.3), InvalidArgument);
}

TEST_CASE("denoise bookkeeping and determinism") {
  std::mt19937_64 rng(2);
  const auto d = testing::random_dictionary(rng, 4, 4, 6);
  const auto noisy = testing::random_image(rng, 16, 16);
  for (auto kind : {PenaltyKind::L1, PenaltyKind::L1Inf, PenaltyKind::L12}) {
    DenoiseConfig cfg;
    cfg.kind = kind;
    cfg.lambda = 0.05;
    cfg.solver.max_iter = 20;
    const auto r = denoise_csc(noisy, d, cfg);
    const auto rec = apply_dictionary(d, r.solve.x);
    CHECK(testing::max_abs_diff(rec.values(), r.reconstruction.values()) < 1e-12);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      CHECK(r.denoised.values()[i] == r.reconstruction.values()[i] + r.lowpass.values()[i]);
      CHECK(r.lowpass.values()[i] + r.highpass.values()[i] == doctest::Approx(noisy.values()[i]));
    }
    CHECK(denoise_csc(noisy, d, cfg).denoised == r.denoised);
  }
}

TEST_CASE("zero-noise input") {
  const auto& sc = scene();
  DenoiseConfig cfg;
  cfg.lambda = 1e-4;
  cfg.solver.max_iter = 50;
  const auto r = denoise_csc(sc.reference, sc.dict, cfg);
  CHECK(psnr(sc.reference, r.denoised) >= 35.0);
  CHECK(psnr(sc.reference, sc.reference) == kInfinitePsnr);
}

TEST_CASE("grids") {
  const auto g = log_grid(0.01, 1.0, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.01));
  CHECK(g[1] == doctest::Approx(0.1));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(log_grid(0.5, 0.5, 1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(log_grid(1.0, 0.1, 3), InvalidArgument);
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(log_grid(0.1, 1.0, 0), InvalidArgument);
  const Shape img{64, 64}, f{8, 8};
  const auto d = default_grid(PenaltyKind::L1, Weighting::None, 0.05, img, f);
  CHECK(d.size() == 16);
  CHECK(d.front() == doctest::Approx(0.01));
  CHECK(d.back() == doctest::Approx(1.0));
  CHECK(default_grid(PenaltyKind::L1, Weighting::None, 0.1, img, f).back() == doctest::Approx(2.0));
  CHECK(grid_scale(PenaltyKind::L1Inf, Weighting::None, img, f) == doctest::Approx(30.0));
  CHECK(grid_scale(PenaltyKind::L1Inf, Weighting::None, {128, 128}, f) == doctest::Approx(120.0));
  CHECK(grid_scale(PenaltyKind::L12, Weighting::None, {128, 128}, f) == doctest::Approx(3.0));
  CHECK(grid_scale(PenaltyKind::L1, Weighting::L1Corr, img, f) == doctest::Approx(50.0));
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
}

TEST_CASE("grid search") {
  const auto& sc = scene();
  DenoiseConfig cfg;
  cfg.solver.max_iter = 60;
  SUBCASE("single point") {
    const auto r = lambda_grid_search(sc.noisy, sc.reference, sc.dict, cfg, {0.07});
    CHECK(r.best_lambda == 0.07);
    CHECK(r.table.size() == 1);
    CHECK(r.best_psnr == r.table[0].psnr);
  }
  SUBCASE("over-smoothing never wins and ties go low") {
    const std::vector<double> grid{0.05, 1e6, 1e7};
    const auto r = lambda_grid_search(sc.noisy, sc.reference, sc.dict, cfg, grid);
    CHECK(r.table.size() == 3);
    CHECK(r.best_lambda == 0.05);
    CHECK(r.table[1].psnr == r.table[2].psnr);
    for (const auto& pt : r.table) CHECK(r.best_psnr >= pt.psnr);
    const auto tie = lambda_grid_search(sc.noisy, sc.reference, sc.dict, cfg, {1e6, 1e7});
    CHECK(tie.best_lambda == 1e6);
  }
  CHECK_THROWS_AS(lambda_grid_search(sc.noisy, sc.reference, sc.dict, cfg, {}), InvalidArgument);
  CHECK_THROWS_AS(lambda_grid_search(sc.noisy, sc.reference, sc.dict, cfg, {0.2, 0.1}),
                  InvalidArgument);
}

TEST_CASE("denoising gains at 64x64") {
  const auto& sc = scene();
  const double noisy_psnr = psnr(sc.reference, sc.noisy);
  CHECK(std::abs(noisy_psnr - 26.02) < 0.2);
  DenoiseConfig l1;
  const auto base = lambda_grid_search(
      sc.noisy, sc.reference, sc.dict, l1,
      default_grid(PenaltyKind::L1, Weighting::None, 0.05, {64, 64}, {8, 8}, 6));
  CHECK(base.best_psnr >= noisy_psnr + 1.0);
  DenoiseConfig corr;
  corr.weighting = Weighting::L1Corr;
  const auto weighted = lambda_grid_search(
      sc.noisy, sc.reference, sc.dict, corr,
      default_grid(PenaltyKind::L1, Weighting::L1Corr, 0.05, {64, 64}, {8, 8}, 6));
  MESSAGE("l1 " << base.best_psnr << " dB, l1corr " << weighted.best_psnr << " dB");
  CHECK(weighted.best_psnr >= base.best_psnr);
}

TEST_CASE("block errors") {
  std::mt19937_64 rng(3);
  const auto ref = testing::random_image(rng, 9, 7);
  const auto same = block_error_scatter(ref, ref, {3, 2}, "x");
  CHECK(same.size() == 63);
  for (const auto& b : same) {
    CHECK(b.error == 0.0);
    CHECK(b.method == "x");
  }
  Image shifted = ref;
  for (double& v : shifted.values()) v += 0.25;
  const auto off = block_error_scatter(ref, shifted, {3, 2});
  for (const auto& b : off) CHECK(b.error == doctest::Approx(0.25 * std::sqrt(6.0)));
  // Reference norm of the block at (8, 6) wraps around both edges.
  double e = 0.0;
  for (std::size_t r : {8u, 0u, 1u})
    for (std::size_t c : {6u, 0u}) e += ref(r, c) * ref(r, c);
  CHECK(off[8 * 7 + 6].row == 8);
  CHECK(off[8 * 7 + 6].col == 6);
  CHECK(off[8 * 7 + 6].reference_norm == doctest::Approx(std::sqrt(e)));
  CHECK_THROWS_AS(block_error_scatter(ref, Image(9, 6), {3, 2}), DimensionError);
  CHECK_THROWS_AS(block_error_scatter(ref, ref, {10, 2}), DimensionError);

  std::vector<BlockErrorRecord> recs;
  for (int i = 0; i < 20; ++i) recs.push_back({0, 0, double(i), double(100 - i), ""});
  CHECK(top_fraction_mean_error(recs, 0.1) == doctest::Approx((81.0 + 82.0) / 2));
  CHECK(top_fraction_mean_error(recs, 1.0) == doctest::Approx(90.5));
  CHECK(top_fraction_mean_error(recs, 0.01) == doctest::Approx(81.0));
  CHECK_THROWS_AS(top_fraction_mean_error(recs, 0.0), InvalidArgument);
}

TEST_CASE("omp") {
  const auto dict = overcomplete_dct({8, 8}, 12);
  CHECK(dict.num_atoms == 144);
  for (std::size_t j = 0; j < dict.num_atoms; ++j) CHECK(norm2(dict.atom(j)) == doctest::Approx(1.0));

  SUBCASE("exact atom is picked first") {
    std::vector<double> sig(dict.atom(37).begin(), dict.atom(37).end());
    for (double& v : sig) v *= 2.5;
    const auto code = omp_code(dict, sig, 1e-9, 32);
    REQUIRE(!code.support.empty());
    CHECK(code.support[0] == 37);
    CHECK(code.support.size() == 1);
    CHECK(code.coefficients[0] == doctest::Approx(2.5));
    CHECK(code.residual_norm < 1e-9);
  }
  SUBCASE("threshold and cap") {
    std::mt19937_64 rng(4);
    const auto sig = testing::random_vector(rng, 64);
    CHECK(omp_code(dict, sig, 1e9, 32).support.empty());
    const auto capped = omp_code(dict, sig, 0.0, 5);
    CHECK(capped.support.size() == 5);
    const auto more = omp_code(dict, sig, 0.0, 10);
    CHECK(more.residual_norm < capped.residual_norm);
    CHECK_THROWS_AS(omp_code(dict, std::vector<double>(10), 0.1, 5), DimensionError);
  }
  SUBCASE("huge sigma returns the lowpass") {
    const auto& sc = scene();
    const auto out = denoise_omp(sc.noisy, dict, 1e6);
    const auto low = tikhonov_lowpass(sc.noisy, kDefaultLowpassLambda).lowpass;
    CHECK(testing::max_abs_diff(out.values(), low.values()) < 1e-12);
  }
  SUBCASE("denoises the test scene") {
    const auto& sc = scene();
    const double gain = psnr(sc.reference, denoise_omp(sc.noisy, dict, 0.05)) - psnr(sc.reference, sc.noisy);
    MESSAGE("omp gain " << gain << " dB");
    CHECK(gain > 1.0);
  }
}
