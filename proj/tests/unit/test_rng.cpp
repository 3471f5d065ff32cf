#include <doctest.h>

#include <cmath>
#include <set>

#include "uqeval/rng.hpp"

using namespace uqeval;

TEST_SUITE("rng") {
  TEST_CASE("philox known-answer vectors") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are pure functions of their address") {
    CounterRng a(42, rng_purpose::kAnnotation, 3, 1);
    CounterRng b(42, rng_purpose::kAnnotation, 3, 1);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
    CounterRng c(42, rng_purpose::kAnnotation, 3, 2);
    CounterRng d(42, rng_purpose::kAnnotation, 3, 1);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += c.next_u32() == d.next_u32();
    CHECK(same < 3);
    CounterRng e(43, rng_purpose::kAnnotation, 3, 1);
    CounterRng f(42, rng_purpose::kBaseField, 3, 1);
    CHECK(e.next_u64() != CounterRng(42, rng_purpose::kAnnotation, 3, 1).next_u64());
    CHECK(f.next_u64() != CounterRng(42, rng_purpose::kAnnotation, 3, 1).next_u64());
  }

  TEST_CASE("uniform and normal moments") {
    CounterRng r(7, rng_purpose::kAleatoricSample);
    double su = 0.0, sn = 0.0, sn2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      su += u;
      const double z = r.normal();
      sn += z;
      sn2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("categorical frequencies") {
    CounterRng r(9, rng_purpose::kAnnotation);
    const double w[] = {0.2, 0.0, 0.8};
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 100000; ++i) ++counts[r.categorical(w, 3)];
    CHECK(counts[1] == 0);
    CHECK(counts[0] / 100000.0 == doctest::Approx(0.2).epsilon(0.03));
  }
}
