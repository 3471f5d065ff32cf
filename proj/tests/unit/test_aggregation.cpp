#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "uqeval/aggregation.hpp"

using namespace uqeval;

namespace {

Map map_of(std::size_t rows, std::size_t cols, std::vector<double> v) { return Map(rows, cols, std::move(v)); }
LabelMap labels_of(std::size_t rows, std::size_t cols, std::vector<std::int32_t> v) {
  return LabelMap(rows, cols, std::move(v));
}

LabelMap center_pixel() { return labels_of(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0}); }

template <typename T>
Image<T> rotate90(const Image<T>& in) {
  Image<T> out(in.cols(), in.rows());
  for (std::size_t r = 0; r < in.rows(); ++r) {
    for (std::size_t c = 0; c < in.cols(); ++c) out(c, in.rows() - 1 - r) = in(r, c);
  }
  return out;
}

Map random_map(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Map m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = u(rng);
  return m;
}

LabelMap random_labels(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int classes) {
  std::uniform_int_distribution<int> u(0, classes - 1);
  LabelMap m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = u(rng);
  return m;
}

}  // namespace

TEST_SUITE("aggregation") {
  TEST_CASE("mean examples") {
    CHECK(aggregate_mean(Map(4, 4, 0.3)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(aggregate_mean(map_of(2, 2, {0, 0, 1, 1})) == 0.5);
    CHECK(aggregate_mean(map_of(3, 3, {0, .1, .2, .3, .4, .5, .6, .7, .8})) == doctest::Approx(0.4).epsilon(1e-14));
  }

  TEST_CASE("patch max examples") {
    std::mt19937_64 rng(1);
    const Map u = random_map(rng, 6, 6);
    CHECK(aggregate_patch_max(u, 6) == doctest::Approx(aggregate_mean(u)).epsilon(1e-14));
    double top = 0.0;
    for (double v : u.values()) top = std::max(top, v);
    CHECK(aggregate_patch_max(u, 1) == top);
    Map block(4, 4, 0.0);
    block(1, 2) = block(1, 3) = block(2, 2) = block(2, 3) = 1.0;
    CHECK(aggregate_patch_max(block, 2) == 1.0);
    CHECK_THROWS_AS(aggregate_patch_max(block, 5), Error);
    try {
      aggregate_patch_max(map_of(3, 8, std::vector<double>(24, 0.0)), 4);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PatchTooLarge);
    }
  }

  TEST_CASE("patch max matches window enumeration") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> side(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t rows = side(rng), cols = side(rng);
      const Map u = random_map(rng, rows, cols);
      std::uniform_int_distribution<std::size_t> k(1, std::min(rows, cols));
      const std::size_t p = k(rng);
      REQUIRE(std::abs(aggregate_patch_max(u, p) - oracle::patch_max(u, p)) < 1e-12);
    }
  }

  TEST_CASE("threshold examples") {
    CHECK(aggregate_threshold(map_of(2, 2, {0.1, 0.2, 0.3, 0.4}), 0.0) == 1.0);
    CHECK(aggregate_threshold(map_of(2, 2, {0.1, 0.2, 0.3, 0.4}), 0.4) == 0.0);
    CHECK(aggregate_threshold(map_of(2, 2, {0.1, 0.2, 0.3, 0.4}), 0.25) == 0.5);
    std::mt19937_64 rng(3);
    const Map u = random_map(rng, 8, 8);
    double last = 1.0;
    for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
      const double s = aggregate_threshold(u, tau);
      CHECK(s <= last);
      last = s;
    }
  }

  TEST_CASE("area normalization examples") {
    const Map five = map_of(2, 2, {1.0, 1.5, 2.0, 0.5});
    CHECK(aggregate_area_normalized(five, LabelMap(2, 2, 0), 0) == 5.0);
    const Map two = map_of(3, 3, {0.5, 0.5, 0.5, 0.5, 0, 0, 0, 0, 0});
    const LabelMap area4 = labels_of(3, 3, {1, 1, 0, 0, 1, 1, 0, 0, 0});
    CHECK(aggregate_area_normalized(two, area4, 0) == 0.5);
    CHECK(aggregate_area_normalized(Map(3, 3, 0.3), LabelMap(3, 3, 1), 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate_area_normalized(Map(2, 2, 0.3), LabelMap(3, 3, 1), 0), Error);
  }

  TEST_CASE("border length examples") {
    CHECK(border_length(LabelMap(5, 5, 2)) == 0);
    CHECK(border_length(center_pixel()) == 4);
    CHECK(border_length(labels_of(1, 4, {0, 1, 0, 1})) == 3);
  }

  TEST_CASE("border normalization examples") {
    CHECK(aggregate_border_normalized(map_of(1, 2, {3.0, 4.0}), LabelMap(1, 2, 0)) == 7.0);
    Map two(3, 3, 0.0);
    two(0, 0) = 2.0;
    CHECK(aggregate_border_normalized(two, center_pixel()) == 0.5);
    Map doubled = two;
    for (double& v : doubled.values()) v *= 2.0;
    CHECK(aggregate_border_normalized(doubled, center_pixel()) == 1.0);
    try {
      aggregate_border_normalized(Map(2, 2), center_pixel());
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
  }

  TEST_CASE("linearity, label permutation and rotation invariance") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Map u = random_map(rng, 7, 5);
      const LabelMap l = random_labels(rng, 7, 5, 3);
      Map scaled = u;
      for (double& v : scaled.values()) v *= 2.5;
      CHECK(aggregate_mean(scaled) == doctest::Approx(2.5 * aggregate_mean(u)).epsilon(1e-13));
      CHECK(aggregate_area_normalized(scaled, l, 0) ==
            doctest::Approx(2.5 * aggregate_area_normalized(u, l, 0)).epsilon(1e-13));
      CHECK(aggregate_border_normalized(scaled, l) ==
            doctest::Approx(2.5 * aggregate_border_normalized(u, l)).epsilon(1e-13));

      LabelMap relabeled = l;
      for (auto& v : relabeled.values()) v = (v + 1) % 3;
      CHECK(border_length(relabeled) == border_length(l));

      const Map ur = rotate90(u);
      const LabelMap lr = rotate90(l);
      CHECK(aggregate_mean(ur) == doctest::Approx(aggregate_mean(u)).epsilon(1e-13));
      CHECK(aggregate_patch_max(ur, 3) == doctest::Approx(aggregate_patch_max(u, 3)).epsilon(1e-13));
      CHECK(aggregate_threshold(ur, 0.5) == aggregate_threshold(u, 0.5));
      CHECK(aggregate_area_normalized(ur, lr, 0) == doctest::Approx(aggregate_area_normalized(u, l, 0)).epsilon(1e-13));
      CHECK(aggregate_border_normalized(ur, lr) == doctest::Approx(aggregate_border_normalized(u, l)).epsilon(1e-13));
    }
  }

  TEST_CASE("dispatch and percentile") {
    const Map u = map_of(3, 3, {0, .1, .2, .3, .4, .5, .6, .7, .8});
    const LabelMap l = center_pixel();
    CHECK(aggregate(u, ImageMean{}) == aggregate_mean(u));
    CHECK(aggregate(u, PatchMax{2}) == aggregate_patch_max(u, 2));
    CHECK(aggregate(u, Threshold{0.35}) == aggregate_threshold(u, 0.35));
    CHECK(aggregate(u, AreaNormalized{0}, &l) == aggregate_area_normalized(u, l, 0));
    CHECK(aggregate(u, BorderNormalized{}, &l) == aggregate_border_normalized(u, l));
    CHECK_THROWS_AS(aggregate(u, BorderNormalized{}), Error);
    CHECK(strategy_name(PatchMax{10}) == "patch_max(10)");

    const double v[] = {1.0, 2.0, 3.0, 4.0};
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 100.0) == 4.0);
    CHECK(percentile(v, 50.0) == 2.5);
    CHECK(percentile(v, 95.0) == doctest::Approx(3.85).epsilon(1e-14));
  }
}
