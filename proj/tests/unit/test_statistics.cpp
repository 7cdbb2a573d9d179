#include <doctest.h>

#include <cmath>

#include "copeq/errors.hpp"
#include "copeq/samplers.hpp"
#include "copeq/statistics.hpp"
#include "support.hpp"

using namespace copeq;
using copeq::testing::random_sample;

namespace {

struct ShiftedProduct final : CopulaSurface {
  double shift;
  explicit ShiftedProduct(double s) : shift(s) {}
  int dim() const override { return 2; }
  double evaluate(std::span<const double> u) const override { return u[0] * u[1] + shift; }
};

CopulaEvaluator bernstein_of(const Sample& s, int m) {
  return CopulaEvaluator(pseudo_observations(s), BernsteinOrder(m));
}

struct Direct {
  double R = 0, S = 0, T = 0;
};

Direct direct_statistics(const CopulaEvaluator& c, const CopulaEvaluator& d, double n1, double n2, int g) {
  Direct out;
  const double scale = n1 * n2 / (n1 + n2);
  for (int a = 1; a <= g; ++a) {
    for (int b = 1; b <= g; ++b) {
      const std::vector<double> mid{(a - 0.5) / g, (b - 0.5) / g};
      const double diff = bernstein_copula_eval_naive(c, mid) - bernstein_copula_eval_naive(d, mid);
      auto at = [&](int i, int j) {
        const std::vector<double> corner{static_cast<double>(i) / g, static_cast<double>(j) / g};
        return bernstein_copula_eval_naive(c, corner);
      };
      const double mass = at(a, b) - at(a - 1, b) - at(a, b - 1) + at(a - 1, b - 1);
      out.R += diff * diff / (g * g);
      out.S += mass * diff * diff;
      out.T = std::max(out.T, std::abs(diff));
    }
  }
  out.R *= scale;
  out.S *= scale;
  out.T *= std::sqrt(scale);
  return out;
}

}  // namespace

TEST_SUITE("statistics") {
  TEST_CASE("sample sizes") {
    const SampleSizes s(100, 50);
    CHECK(s.lambda() == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(s.scale() == doctest::Approx(100.0 * 50 / 150).epsilon(1e-15));
    CHECK(s.scale() == doctest::Approx(s.n2 * s.lambda()).epsilon(1e-14));
    CHECK_THROWS_AS(SampleSizes(0, 5), DomainError);
  }

  TEST_CASE("identical surfaces give zero") {
    RngStream rng(1);
    const auto s = random_sample(15, 2, rng);
    const auto c = bernstein_of(s, 3);
    const auto d = bernstein_of(s, 3);
    const auto grid = make_grid(2, 7);
    const auto t = compute_statistics(c, d, SampleSizes(15, 15), grid);
    CHECK(t.R == 0.0);
    CHECK(t.S == 0.0);
    CHECK(t.T == 0.0);
  }

  TEST_CASE("constant gap stubs") {
    const ShiftedProduct c(0.0), d(0.1);
    const SampleSizes sizes(50, 50);
    const auto grid = make_grid(2, 2);
    CHECK(compute_R(c, d, sizes, grid) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(compute_S(c, d, sizes, grid) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(compute_T(c, d, sizes, grid) == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("statistics match direct loops") {
    RngStream rng(2);
    for (int rep = 0; rep < 10; ++rep) {
      const auto c = bernstein_of(random_sample(20, 2, rng), 4);
      const auto d = bernstein_of(random_sample(20, 2, rng), 4);
      const auto grid = make_grid(2, 5);
      const auto t = compute_statistics(c, d, SampleSizes(20, 20), grid);
      const auto ref = direct_statistics(c, d, 20, 20, 5);
      CHECK(std::abs(t.R - ref.R) <= 1e-12);
      CHECK(std::abs(t.S - ref.S) <= 1e-12);
      CHECK(t.T == doctest::Approx(ref.T).epsilon(1e-14));
      CHECK(compute_R(c, d, SampleSizes(20, 20), grid) == t.R);
      CHECK(compute_S(c, d, SampleSizes(20, 20), grid) == t.S);
      CHECK(compute_T(c, d, SampleSizes(20, 20), grid) == t.T);
    }
  }

  TEST_CASE("R and T are symmetric in the two samples") {
    RngStream rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t n1 = 10 + rng.below(30), n2 = 10 + rng.below(30);
      const auto c = bernstein_of(random_sample(n1, 2, rng), 3);
      const auto d = bernstein_of(random_sample(n2, 2, rng), 5);
      const auto grid = make_grid(2, 6);
      CHECK(compute_R(c, d, SampleSizes(n1, n2), grid) == compute_R(d, c, SampleSizes(n2, n1), grid));
      CHECK(compute_T(c, d, SampleSizes(n1, n2), grid) == compute_T(d, c, SampleSizes(n2, n1), grid));
    }
  }

  TEST_CASE("R and T are nonnegative, S too under nonnegative masses") {
    RngStream rng(4);
    for (int rep = 0; rep < 20; ++rep) {
      const auto sc = random_sample(12, 3, rng);
      const auto sd = random_sample(14, 3, rng);
      const auto grid = make_grid(3, 4);
      const auto b = compute_statistics(bernstein_of(sc, 4), bernstein_of(sd, 4), SampleSizes(12, 14), grid);
      CHECK(b.R >= 0.0);
      CHECK(b.T >= 0.0);
      const CopulaEvaluator ec(pseudo_observations(sc)), ed(pseudo_observations(sd));
      const auto e = compute_statistics(ec, ed, SampleSizes(12, 14), grid);
      CHECK(e.S >= 0.0);
    }
  }

  TEST_CASE("dimension mismatch") {
    RngStream rng(5);
    const auto c = bernstein_of(random_sample(10, 2, rng), 2);
    const auto d = bernstein_of(random_sample(10, 3, rng), 2);
    CHECK_THROWS_AS(compute_R(c, d, SampleSizes(10, 10), make_grid(2, 3)), DomainError);
    CHECK_THROWS_AS(compute_R(c, c, SampleSizes(10, 10), make_grid(3, 3)), DomainError);
  }
}

TEST_SUITE("statistical") {
  TEST_CASE("scaled R settles as n grows") {
    const auto grid = make_grid(2, 20);
    auto mean_ratio = [&](std::size_t n) {
      double total = 0.0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto rng = RngStream(77).split(seed).split(n);
        const auto x = sample_clayton(n, 2, clayton_theta_from_tau(0.2), rng);
        const auto y = sample_clayton(n, 2, clayton_theta_from_tau(0.6), rng);
        const int m = static_cast<int>(n / 5);
        total += compute_R(bernstein_of(x, m), bernstein_of(y, m), SampleSizes(n, n), grid) /
                 static_cast<double>(n);
      }
      return total / 20;
    };
    const double small = mean_ratio(100);
    const double large = mean_ratio(400);
    MESSAGE("R/n2 at n=100: " << small << ", n=400: " << large);
    CHECK(std::abs(large - small) < 0.25 * small);
  }
}
