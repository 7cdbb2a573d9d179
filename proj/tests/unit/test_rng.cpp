#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "copeq/errors.hpp"
#include "copeq/rng.hpp"

using namespace copeq;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  }

  TEST_CASE("same seed and keys give the same sequence") {
    auto a = RngStream(42).split(3).split(7);
    auto b = RngStream(42).split(3).split(7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
  }

  TEST_CASE("distinct keys and seeds give distinct streams") {
    std::set<std::uint64_t> first;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      auto s = RngStream(1).split(k);
      first.insert(s());
    }
    CHECK(first.size() == 1000);
    auto a = RngStream(1);
    auto b = RngStream(2);
    CHECK(a() != b());
    auto c = RngStream(1).split(0).split(1);
    auto d = RngStream(1).split(1).split(0);
    CHECK(c() != d());
  }

  TEST_CASE("splitting does not advance the parent") {
    auto a = RngStream(9);
    auto b = RngStream(9);
    (void)a.split(5);
    CHECK(a() == b());
  }

  TEST_CASE("uniform draws stay in range") {
    auto r = RngStream(5);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform();
      const double v = r.uniform_open();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      REQUIRE(v > 0.0);
      REQUIRE(v < 1.0);
      sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("bounded integers are uniform") {
    auto r = RngStream(6);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[r.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  }

  TEST_CASE("exponential, normal and gamma moments") {
    auto r = RngStream(7);
    const int n = 200000;
    double e1 = 0, e2 = 0, z1 = 0, z2 = 0;
    for (int i = 0; i < n; ++i) {
      const double e = r.exponential();
      const double z = r.normal();
      e1 += e;
      e2 += e * e;
      z1 += z;
      z2 += z * z;
    }
    CHECK(e1 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(e2 / n - (e1 / n) * (e1 / n) == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(z1 / n) < 0.01);
    CHECK(z2 / n == doctest::Approx(1.0).epsilon(0.01));

    for (double shape : {0.25, 0.8, 1.0, 3.5}) {
      double g1 = 0, g2 = 0;
      for (int i = 0; i < n; ++i) {
        const double g = r.gamma(shape);
        REQUIRE(g > 0.0);
        g1 += g;
        g2 += g * g;
      }
      const double mean = g1 / n;
      CHECK(mean == doctest::Approx(shape).epsilon(0.02));
      CHECK(g2 / n - mean * mean == doctest::Approx(shape).epsilon(0.05));
    }
    CHECK_THROWS_AS(r.gamma(0.0), DomainError);
    CHECK_THROWS_AS(r.gamma(-1.0), DomainError);
  }
}
