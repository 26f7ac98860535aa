#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "brute.hpp"
#include "csc/error.hpp"
#include "csc/groups.hpp"
#include "support.hpp"

using namespace csc;
using testing::max_abs_diff;

namespace {

GroupOperator unit_op(Shape filter, std::size_t m, Shape image) {
  return GroupOperator(GroupKernels::unit(filter, m), image);
}

// The 1-D example as a 1 x 3 image, one map, 1 x 2 unit kernel.
CoefficientMaps toy_x() { return CoefficientMaps(1, 1, 3, std::vector<double>{1.0, -2.0, 3.0}); }

}  // namespace

TEST_CASE("1-D example") {
  const auto g = unit_op({1, 2}, 1, {1, 3});
  const auto sums = group_sums(g, toy_x(), true);
  CHECK(sums(0, 0) == doctest::Approx(4.0));
  CHECK(sums(0, 1) == doctest::Approx(3.0));
  CHECK(sums(0, 2) == doctest::Approx(5.0));
  CHECK(norm_l1inf(g, toy_x()) == doctest::Approx(5.0));
  CHECK(norm_l12(g, toy_x()) == doctest::Approx(std::sqrt(50.0)));
  CHECK(norm_l1inf(g, CoefficientMaps(1, 1, 3)) == 0.0);
  CHECK(norm_l12(g, CoefficientMaps(1, 1, 3)) == 0.0);
  const std::vector<double> w{1.0, 2.0, 0.5};
  const std::vector<double> w2{2.0, 4.0, 1.0};
  CHECK(norm_l1inf(g, toy_x(), w2) == doctest::Approx(2.0 * norm_l1inf(g, toy_x(), w)));
  CHECK(norm_l12(g, toy_x(), w) == doctest::Approx(std::sqrt(16.0 + 2 * 9.0 + 0.5 * 25.0)));
  CHECK(max_abs_diff(brute::stripe_group_sums(toy_x(), {1, 2}, true).values(), sums.values()) < 1e-12);
}

TEST_CASE("delta coefficient stamps h*w groups") {
  const auto g = unit_op({3, 2}, 2, {7, 6});
  CoefficientMaps x(2, 7, 6);
  x(1, 5, 4) = 1.0;
  const auto sums = group_sums(g, x, false);
  int nonzero = 0;
  for (double v : sums.values()) {
    if (std::abs(v) > 1e-12) {
      ++nonzero;
      CHECK(v == doctest::Approx(1.0));
    }
  }
  CHECK(nonzero == 6);
  CHECK(norm_l12(g, CoefficientMaps(2, 7, 6, [] {
          std::vector<double> v(84, 0.0);
          v[10] = -2.5;
          return v;
        }())) == doctest::Approx(2.5 * std::sqrt(6.0)));
}

TEST_CASE("brute-force stripe enumeration") {
  std::mt19937_64 rng(1);
  const auto g = unit_op({3, 3}, 3, {12, 12});
  for (int t = 0; t < 5; ++t) {
    const auto x = testing::random_maps(rng, 3, 12, 12);
    CHECK(max_abs_diff(group_sums(g, x, true).values(),
                       brute::stripe_group_sums(x, {3, 3}, true).values()) <= 1e-10);
    CHECK(max_abs_diff(group_sums(g, x, false).values(),
                       brute::stripe_group_sums(x, {3, 3}, false).values()) <= 1e-10);
  }
  const auto g2 = unit_op({2, 4}, 2, {5, 9});
  const auto x = testing::random_maps(rng, 2, 5, 9);
  CHECK(max_abs_diff(group_sums(g2, x, true).values(),
                     brute::stripe_group_sums(x, {2, 4}, true).values()) <= 1e-10);
}

TEST_CASE("adjoint") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    GroupKernels k = GroupKernels::unit({2 + std::size_t(t % 2), 3}, 2);
    for (double& v : k.values) v = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const GroupOperator g(k, {6, 7});
    const auto x = testing::random_maps(rng, 2, 6, 7);
    const auto v = testing::random_image(rng, 6, 7);
    const double lhs = dot(group_sums(g, x, false).values(), v.values());
    const double rhs = dot(x.values(), group_sums_adjoint(g, v).values());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * norm2(x.values()) * norm2(v.values()));
  }
  const auto g = unit_op({2, 2}, 2, {5, 5});
  const auto zero = group_sums_adjoint(g, Image(5, 5));
  for (double v : zero.values()) CHECK(v == 0.0);

  // Delta at p stamps the reversed kernel: map m at p - d gets k_m[d].
  GroupKernels k = GroupKernels::unit({2, 3}, 1);
  k.values = {1, 2, 3, 4, 5, 6};
  const GroupOperator gk(k, {5, 6});
  Image v(5, 6);
  v(1, 1) = 1.0;
  const auto a = group_sums_adjoint(gk, v);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      const std::size_t dr = (1 + 5 - r) % 5, dc = (1 + 6 - c) % 6;
      const double want = (dr < 2 && dc < 3) ? k.values[dr * 3 + dc] : 0.0;
      CHECK(a(0, r, c) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("norm inequalities and constant sums") {
  std::mt19937_64 rng(3);
  const auto g = unit_op({3, 2}, 4, {8, 9});
  for (int t = 0; t < 50; ++t) {
    const auto x = testing::random_maps(rng, 4, 8, 9);
    const double inf = norm_l1inf(g, x), l12 = norm_l12(g, x);
    CHECK(inf <= l12 + 1e-12);
    CHECK(l12 <= std::sqrt(double(g.num_groups())) * inf + 1e-12);
  }
  const auto sums = group_sums(g, CoefficientMaps(4, 8, 9, 1.0), false);
  for (double v : sums.values()) CHECK(v == doctest::Approx(24.0));
  CHECK_THROWS_AS(group_sums(g, CoefficientMaps(4, 8, 8), true), DimensionError);
  CHECK_THROWS_AS(group_sums(g, CoefficientMaps(3, 8, 9), true), DimensionError);
}

TEST_CASE("stripe weight kernels") {
  SUBCASE("constant 2x2 filter") {
    const Dictionary d(2, 2, 1, {0.5, 0.5, 0.5, 0.5}, true);
    const auto k = stripe_weight_kernels(d);
    CHECK(k.values[0] == doctest::Approx(1.0));
    CHECK(k.values[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(k.values[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(k.values[3] == doctest::Approx(0.5));
  }
  SUBCASE("matches partial norms") {
    std::mt19937_64 rng(4);
    const auto d = testing::random_dictionary(rng, 4, 3, 5);
    const auto k = stripe_weight_kernels(d);
    CHECK(k.shape == d.filter_shape());
    for (std::size_t m = 0; m < 5; ++m) {
      CHECK(k.kernel(m)[0] == doctest::Approx(1.0));
      for (std::size_t dr = 0; dr < 4; ++dr) {
        for (std::size_t dc = 0; dc < 3; ++dc) {
          // Filter placed at p - (dr, dc) intersected with the patch at p.
          double e = 0.0;
          for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 3; ++c)
              if (r >= dr && c >= dc) e += d(m, r, c) * d(m, r, c);
          const double kv = k.kernel(m)[dr * 3 + dc];
          CHECK(kv == doctest::Approx(std::sqrt(e)));
          CHECK(kv > 0.0);
          CHECK(kv <= 1.0 + 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(stripe_weight_kernels(Dictionary(1, 2, 1, {1.0, 1.0}, false)), InvalidArgument);
  CHECK(GroupKernels::unit({2, 2}, 3).is_unit());
}
