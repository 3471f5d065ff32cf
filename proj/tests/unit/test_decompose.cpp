#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uqeval/decompose.hpp"
#include "uqeval/reduce.hpp"

using namespace uqeval;

namespace {

SampleGrid pixel_grid(std::size_t m, std::size_t n, std::vector<double> probs, std::size_t classes = 2) {
  return SampleGrid(GridShape{m, n, classes, 1, 1}, std::move(probs));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an uqeval::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("decompose") {
  TEST_CASE("shannon entropy examples") {
    const double one_hot[] = {1.0, 0.0};
    const double uniform[] = {0.5, 0.5};
    const double skew[] = {0.7, 0.3};
    CHECK(shannon_entropy(one_hot) == 0.0);
    CHECK(shannon_entropy(uniform) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const long double ref = -0.7L * std::log(0.7L) - 0.3L * std::log(0.3L);
    CHECK(std::abs(shannon_entropy(skew) - static_cast<double>(ref)) < 1e-15);
    CHECK(std::abs(shannon_entropy(skew) - 0.6109) < 1e-4);
  }

  TEST_CASE("shannon entropy rejects bad vectors") {
    const double off[] = {0.6, 0.5};
    const double neg[] = {1.1, -0.1};
    const double tiny_neg[] = {1.0 + 5e-10, -5e-10};
    CHECK(kind_of([&] { shannon_entropy(off); }) == ErrorKind::NonNormalized);
    CHECK(kind_of([&] { shannon_entropy(neg); }) == ErrorKind::NegativeProbability);
    CHECK(shannon_entropy(tiny_neg) == doctest::Approx(0.0).epsilon(1e-8));
  }

  TEST_CASE("off-simplex by less than the tolerance is renormalized") {
    const double a[] = {0.5 + 4e-6, 0.5};
    const double b[] = {0.5, 0.5};
    CHECK(std::abs(shannon_entropy(a) - shannon_entropy(b)) < 1e-10);
  }

  TEST_CASE("bma examples") {
    const auto one = bma(pixel_grid(1, 1, {0.2, 0.8}));
    CHECK(one(0, 0, 0) == 0.2);
    CHECK(one(1, 0, 0) == 0.8);
    const auto two = bma(pixel_grid(2, 1, {0.9, 0.1, 0.5, 0.5}));
    CHECK(two(0, 0, 0) == doctest::Approx(0.7));
    CHECK(two(1, 0, 0) == doctest::Approx(0.3));
    const auto four = bma(pixel_grid(2, 2, {0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25, 0.75}));
    CHECK(four(0, 0, 0) == 0.25);
    CHECK(four(1, 0, 0) == 0.75);
  }

  TEST_CASE("worked two-instance example") {
    const auto maps = decompose(pixel_grid(2, 1, {0.9, 0.1, 0.5, 0.5}));
    const long double h09 = -0.9L * std::log(0.9L) - 0.1L * std::log(0.1L);
    const long double h05 = std::log(2.0L);
    const long double au = (h09 + h05) / 2.0L;
    const long double tu = -0.7L * std::log(0.7L) - 0.3L * std::log(0.3L);
    CHECK(std::abs(maps.au(0, 0) - static_cast<double>(au)) < 1e-14);
    CHECK(std::abs(maps.tu(0, 0) - static_cast<double>(tu)) < 1e-14);
    CHECK(std::abs(maps.eu(0, 0) - static_cast<double>(tu - au)) < 1e-14);
    CHECK(std::abs(maps.au(0, 0) - 0.5091) < 1e-4);
    CHECK(std::abs(maps.tu(0, 0) - 0.6109) < 1e-4);
    CHECK(std::abs(maps.eu(0, 0) - 0.1018) < 1e-4);
  }

  TEST_CASE("single instance has no epistemic part") {
    std::mt19937_64 rng(7);
    const auto g = oracle::random_grid(rng, {1, 5, 3, 4, 4});
    const auto maps = decompose(g);
    for (std::size_t i = 0; i < maps.eu.size(); ++i) {
      CHECK(maps.eu[i] == 0.0);
      CHECK(maps.au[i] == maps.tu[i]);
    }
  }

  TEST_CASE("identical samples give zero EU and AU = TU = H(sample)") {
    std::vector<double> probs;
    for (int k = 0; k < 6; ++k) probs.insert(probs.end(), {0.2, 0.3, 0.5});
    const auto maps = decompose(pixel_grid(3, 2, probs, 3));
    const double h[] = {0.2, 0.3, 0.5};
    CHECK(maps.eu(0, 0) == 0.0);
    CHECK(maps.au(0, 0) == doctest::Approx(shannon_entropy(h)).epsilon(1e-14));
    CHECK(maps.tu(0, 0) == doctest::Approx(shannon_entropy(h)).epsilon(1e-14));
  }

  TEST_CASE("one-hot entropies are exactly zero") {
    const auto maps = decompose(pixel_grid(2, 2, {1, 0, 1, 0, 1, 0, 1, 0}));
    CHECK(maps.au(0, 0) == 0.0);
    CHECK(maps.tu(0, 0) == 0.0);
  }

  TEST_CASE("no-EU route reshapes samples into instances") {
    const auto maps = decompose_no_eu(pixel_grid(1, 2, {0.9, 0.1, 0.5, 0.5}));
    const auto ref = decompose(pixel_grid(2, 1, {0.9, 0.1, 0.5, 0.5}));
    CHECK(maps.au(0, 0) == ref.au(0, 0));
    CHECK(maps.eu(0, 0) == ref.eu(0, 0));
    CHECK(maps.tu(0, 0) == ref.tu(0, 0));
    const auto same = decompose_no_eu(pixel_grid(1, 3, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7}));
    CHECK(same.eu(0, 0) == 0.0);
    CHECK(kind_of([] { decompose_no_eu(pixel_grid(1, 1, {0.5, 0.5})); }) == ErrorKind::ShapeError);
    CHECK(kind_of([] { decompose_no_eu(pixel_grid(2, 2, {1, 0, 1, 0, 1, 0, 1, 0})); }) == ErrorKind::ShapeError);
  }

  TEST_CASE("random grids match the extended-precision oracle") {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> dim(1, 6), cls(2, 4), side(1, 8);
    for (int trial = 0; trial < 100; ++trial) {
      const GridShape s{dim(rng), dim(rng), cls(rng), side(rng), side(rng)};
      const auto g = oracle::random_grid(rng, s);
      const auto maps = decompose(g);
      const auto ref = oracle::decompose(g);
      for (std::size_t i = 0; i < s.pixels(); ++i) {
        REQUIRE(std::abs(maps.au[i] - static_cast<double>(ref.au[i])) <= 1e-9);
        REQUIRE(std::abs(maps.tu[i] - static_cast<double>(ref.tu[i])) <= 1e-9);
        REQUIRE(std::abs(maps.eu[i] - static_cast<double>(std::max(ref.eu[i], 0.0L))) <= 1e-9);
        REQUIRE(std::abs(maps.au[i] + maps.eu[i] - maps.tu[i]) <= 1e-6);
        REQUIRE(maps.tu[i] >= maps.au[i]);
        REQUIRE(maps.tu[i] <= std::log(static_cast<double>(s.classes)) + 1e-9);
        REQUIRE(maps.eu[i] >= 0.0);
      }
    }
  }

  TEST_CASE("permuting instances or samples leaves the maps unchanged") {
    std::mt19937_64 rng(99);
    const GridShape s{4, 3, 3, 5, 5};
    const auto g = oracle::random_grid(rng, s);
    std::vector<double> perm(g.values().size());
    const std::size_t mp[] = {2, 0, 3, 1};
    const std::size_t np[] = {1, 2, 0};
    for (std::size_t m = 0; m < 4; ++m) {
      for (std::size_t n = 0; n < 3; ++n) {
        for (std::size_t c = 0; c < 3; ++c) {
          for (std::size_t r = 0; r < 5; ++r) {
            for (std::size_t w = 0; w < 5; ++w) perm[g.index(m, n, c, r, w)] = g(mp[m], np[n], c, r, w);
          }
        }
      }
    }
    const auto a = decompose(g);
    const auto b = decompose(SampleGrid(s, perm));
    for (std::size_t i = 0; i < a.au.size(); ++i) {
      CHECK(std::abs(a.au[i] - b.au[i]) < 1e-9);
      CHECK(std::abs(a.eu[i] - b.eu[i]) < 1e-9);
      CHECK(std::abs(a.tu[i] - b.tu[i]) < 1e-9);
    }
  }

  TEST_CASE("grid validation reports coordinates") {
    std::vector<double> probs(2 * 2 * 2, 0.5);
    probs[5] = std::nan("");
    try {
      SampleGrid(GridShape{1, 1, 2, 2, 2}, probs);
      FAIL("expected NonFiniteData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonFiniteData);
      CHECK(std::string(e.what()).find("row=0") != std::string::npos);
    }
    CHECK(kind_of([] { SampleGrid(GridShape{1, 1, 2, 1, 1}, {0.7, 0.7}); }) == ErrorKind::NonNormalized);
    CHECK(kind_of([] { SampleGrid(GridShape{1, 1, 2, 1, 1}, {1.2, -0.2}); }) == ErrorKind::NegativeProbability);
    CHECK(kind_of([] { SampleGrid(GridShape{1, 1, 1, 1, 1}, {1.0}); }) == ErrorKind::ShapeError);
    CHECK(kind_of([] { SampleGrid(GridShape{1, 1, 2, 1, 1}, {1.0}); }) == ErrorKind::ShapeError);
  }

  TEST_CASE("truncation keeps the leading instances and samples") {
    std::mt19937_64 rng(3);
    const auto g = oracle::random_grid(rng, {4, 5, 2, 3, 3});
    const auto t = g.truncated(2, 3);
    CHECK(t.shape() == GridShape{2, 3, 2, 3, 3});
    CHECK(t(1, 2, 1, 2, 0) == g(1, 2, 1, 2, 0));
    CHECK(g.truncated(10, 10).shape() == g.shape());
  }

  TEST_CASE("argmax ties go to the lowest class") {
    const auto labels = argmax_labels(bma(pixel_grid(1, 1, {0.5, 0.5})));
    CHECK(labels(0, 0) == 0);
  }
}

TEST_SUITE("reduce") {
  TEST_CASE("pairwise sum is exact on small integers and order-fixed") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    CHECK(pairwise_sum(v) == 499500.0);
    CHECK(pairwise_mean(std::span<const double>{}) == 0.0);
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(257, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                      if (i == 7) throw Error(ErrorKind::EmptyInput, "boom");
                    }),
                    Error);
  }
}
