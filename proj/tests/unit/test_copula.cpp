#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "copeq/copula.hpp"
#include "copeq/errors.hpp"
#include "support.hpp"

using namespace copeq;
using copeq::testing::random_point;
using copeq::testing::random_sample;

namespace {

struct ProductStub final : CopulaSurface {
  int d;
  explicit ProductStub(int dim) : d(dim) {}
  int dim() const override { return d; }
  double evaluate(std::span<const double> u) const override {
    double p = 1.0;
    for (double x : u) p *= x;
    return p;
  }
};

Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

CopulaEvaluator random_bernstein(std::size_t n, int d, int m, RngStream& rng) {
  return CopulaEvaluator(pseudo_observations(random_sample(n, d, rng)), BernsteinOrder(m));
}

}  // namespace

TEST_SUITE("copula") {
  TEST_CASE("pseudo-observations use maximal ranks") {
    const Sample s(matrix({{3.1, 5}, {1.2, 5}, {2.5, 7}}));
    const auto p = pseudo_observations(s);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(1, 0) == 1.0 / 3);
    CHECK(p(2, 0) == 2.0 / 3);
    CHECK(p(0, 1) == 2.0 / 3);
    CHECK(p(1, 1) == 2.0 / 3);
    CHECK(p(2, 1) == 1.0);
  }

  TEST_CASE("samples reject degenerate input") {
    CHECK_THROWS_AS(Sample(matrix({{9, 1}})), DomainError);
    CHECK_THROWS_AS(Sample(matrix({{1}, {2}})), DomainError);
    CHECK_THROWS_AS(Sample(matrix({{1, NAN}, {2, 3}})), DomainError);
    CHECK_THROWS_AS(Sample(matrix({{1, INFINITY}, {2, 3}})), DomainError);
  }

  TEST_CASE("pseudo-observation columns are permutations without ties") {
    RngStream rng(3);
    const auto s = random_sample(37, 3, rng);
    const auto p = pseudo_observations(s);
    for (int l = 0; l < 3; ++l) {
      std::vector<int> col(37);
      for (std::size_t i = 0; i < 37; ++i) col[i] = p.rank(i, l);
      std::sort(col.begin(), col.end());
      for (int i = 0; i < 37; ++i) CHECK(col[static_cast<std::size_t>(i)] == i + 1);
    }
  }

  TEST_CASE("empirical copula examples") {
    Eigen::MatrixXi r(2, 2);
    r << 1, 2, 2, 1;
    const PseudoSample p(r);
    const std::vector<double> a{0.5, 0.5}, b{1, 1}, c{0.5, 1};
    CHECK(empirical_copula_eval(p, a) == 0.0);
    CHECK(empirical_copula_eval(p, b) == 1.0);
    CHECK(empirical_copula_eval(p, c) == 0.5);
    const std::vector<double> bad{0.5};
    CHECK_THROWS_AS(empirical_copula_eval(p, bad), DomainError);
  }

  TEST_CASE("empirical copula matches the indicator definition") {
    RngStream rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = random_sample(12, 2 + rep % 2, rng);
      const CopulaEvaluator ev(pseudo_observations(s));
      for (int k = 0; k < 10; ++k) {
        const auto u = random_point(s.dim(), rng);
        CHECK(ev.evaluate(u) == testing::direct_empirical(s, u));
      }
    }
  }

  TEST_CASE("Bernstein copula of a comonotone top row is the product") {
    Eigen::MatrixXi r(2, 3);
    r << 2, 2, 2, 2, 2, 2;
    const CopulaEvaluator ev(PseudoSample(r), BernsteinOrder(1));
    const std::vector<double> u{0.3, 0.6, 0.9};
    CHECK(bernstein_copula_eval(ev, u) == doctest::Approx(0.3 * 0.6 * 0.9).epsilon(1e-15));
    CHECK(bernstein_copula_eval_naive(ev, u) == doctest::Approx(0.3 * 0.6 * 0.9).epsilon(1e-15));
    const std::vector<double> half{0.5, 0.5, 1.0};
    CHECK(bernstein_copula_eval_naive(ev, half) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(bernstein_partial_derivative(ev, u, 0) == doctest::Approx(0.6 * 0.9).epsilon(1e-15));
    CHECK(bernstein_partial_derivative(ev, u, 2) == doctest::Approx(0.3 * 0.6).epsilon(1e-15));
  }

  TEST_CASE("fast evaluation equals the nested sum") {
    RngStream rng(11);
    {
      auto ev = random_bernstein(6, 2, 4, rng);
      const std::vector<double> u{0.37, 0.81};
      CHECK(std::abs(bernstein_copula_eval(ev, u) - bernstein_copula_eval_naive(ev, u)) <= 1e-12);
    }
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
      const std::size_t n = 2 + rng.below(9);
      const int d = 2 + static_cast<int>(rng.below(2));
      const int m = 1 + static_cast<int>(rng.below(6));
      const auto ev = random_bernstein(n, d, m, rng);
      for (int k = 0; k < 20; ++k) {
        const auto u = random_point(d, rng);
        worst = std::max(worst, std::abs(bernstein_copula_eval(ev, u) - bernstein_copula_eval_naive(ev, u)));
      }
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("lattice evaluation equals pointwise evaluation") {
    RngStream rng(12);
    const auto grid = make_grid(3, 4);
    for (int m : {0, 3}) {
      const auto pseudo = pseudo_observations(random_sample(9, 3, rng));
      const CopulaEvaluator ev =
          m == 0 ? CopulaEvaluator(pseudo) : CopulaEvaluator(pseudo, BernsteinOrder(m));
      const auto lattice = ev.evaluate_lattice(grid.axis_values());
      for (std::size_t p = 0; p < grid.size(); ++p)
        CHECK(std::abs(lattice[p] - ev.evaluate(grid.point(p))) <= 1e-14);
    }
  }

  TEST_CASE("naive oracle refuses oversized sums") {
    RngStream rng(13);
    const auto ev = random_bernstein(20, 3, 300, rng);
    const std::vector<double> u{0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bernstein_copula_eval_naive(ev, u), CapacityError);
  }

  TEST_CASE("boundary values are exact") {
    RngStream rng(17);
    for (int rep = 0; rep < 30; ++rep) {
      const int d = 2 + rep % 3;
      const auto pseudo = pseudo_observations(random_sample(3 + rep, d, rng));
      for (int m : {0, 1, 4, 9}) {
        const CopulaEvaluator ev =
            m == 0 ? CopulaEvaluator(pseudo) : CopulaEvaluator(pseudo, BernsteinOrder(m));
        const std::vector<double> ones(static_cast<std::size_t>(d), 1.0);
        CHECK(ev.evaluate(ones) == 1.0);
        auto u = random_point(d, rng);
        u[static_cast<std::size_t>(rep % d)] = 0.0;
        CHECK(ev.evaluate(u) == 0.0);
      }
    }
  }

  TEST_CASE("values stay in the unit interval and rise along each axis") {
    RngStream rng(19);
    for (int rep = 0; rep < 10; ++rep) {
      const auto ev = random_bernstein(15, 2, 1 + rep, rng);
      for (int axis = 0; axis < 2; ++axis) {
        auto u = random_point(2, rng);
        double prev = -1.0;
        for (int j = 0; j < 50; ++j) {
          u[static_cast<std::size_t>(axis)] = j / 49.0;
          const double v = ev.evaluate(u);
          CHECK(v >= prev);
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("empirical copula Lipschitz bound with rank slack") {
    RngStream rng(23);
    for (int rep = 0; rep < 200; ++rep) {
      const int d = 2 + rep % 2;
      const std::size_t n = 5 + rep % 20;
      const CopulaEvaluator ev(pseudo_observations(random_sample(n, d, rng)));
      const auto u = random_point(d, rng);
      const auto v = random_point(d, rng);
      double dist = 0.0;
      for (int l = 0; l < d; ++l) dist += std::abs(u[static_cast<std::size_t>(l)] - v[static_cast<std::size_t>(l)]);
      CHECK(std::abs(ev.evaluate(u) - ev.evaluate(v)) <= dist + static_cast<double>(d) / static_cast<double>(n));
    }
  }

  TEST_CASE("analytic derivative matches central differences") {
    RngStream rng(29);
    {
      const auto ev = random_bernstein(8, 2, 5, rng);
      std::vector<double> u{0.4, 0.6};
      for (int axis = 0; axis < 2; ++axis) {
        const double step = 1e-5;
        auto hi = u, lo = u;
        hi[static_cast<std::size_t>(axis)] += step;
        lo[static_cast<std::size_t>(axis)] -= step;
        const double fd = (ev.evaluate(hi) - ev.evaluate(lo)) / (2 * step);
        CHECK(std::abs(bernstein_partial_derivative(ev, u, axis) - fd) <= 1e-6);
      }
    }
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
      const std::size_t n = 2 + rng.below(9);
      const int d = 2 + static_cast<int>(rng.below(2));
      const int m = 1 + static_cast<int>(rng.below(6));
      const auto ev = random_bernstein(n, d, m, rng);
      for (int k = 0; k < 5; ++k) {
        auto u = random_point(d, rng);
        for (auto& x : u) x = 0.01 + 0.98 * x;
        for (int axis = 0; axis < d; ++axis) {
          const double step = 1e-5;
          auto hi = u, lo = u;
          hi[static_cast<std::size_t>(axis)] += step;
          lo[static_cast<std::size_t>(axis)] -= step;
          const double fd = (ev.evaluate(hi) - ev.evaluate(lo)) / (2 * step);
          worst = std::max(worst, std::abs(bernstein_partial_derivative(ev, u, axis) - fd));
        }
      }
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("derivative on the top face reduces to the smoothed margin") {
    RngStream rng(31);
    for (int rep = 0; rep < 20; ++rep) {
      const int m = 1 + rep % 8;
      const auto s = random_sample(9, 2, rng);
      const auto pseudo = pseudo_observations(s);
      const CopulaEvaluator ev(pseudo, BernsteinOrder(m));
      const double u1 = rng.uniform();
      const std::vector<double> u{u1, 1.0};
      // d/du sum_{k >= c} P_{k,m}(u), with dP_{k,m} = m (P_{k-1,m-1} - P_{k,m-1})
      double direct = 0.0;
      for (std::size_t i = 0; i < 9; ++i) {
        const int c = static_cast<int>(std::ceil(m * pseudo.rank(i, 0) / 9.0 - 1e-12));
        for (int k = c; k <= m; ++k)
          direct += m * (testing::bernstein_pmf(m - 1, k - 1, u1) - testing::bernstein_pmf(m - 1, k, u1));
      }
      direct /= 9.0;
      CHECK(std::abs(bernstein_partial_derivative(ev, u, 0) - direct) <= 1e-12);
    }
  }

  TEST_CASE("derivative bounds") {
    RngStream rng(37);
    for (int rep = 0; rep < 50; ++rep) {
      const int m = 1 + rep % 10;
      const auto ev = random_bernstein(10, 2 + rep % 2, m, rng);
      const auto u = random_point(ev.dim(), rng);
      for (int axis = 0; axis < ev.dim(); ++axis) {
        double peak = 0.0;
        for (int k = 0; k < m; ++k)
          peak = std::max(peak, testing::bernstein_pmf(m - 1, k, u[static_cast<std::size_t>(axis)]));
        const double v = bernstein_partial_derivative(ev, u, axis);
        CHECK(v >= 0.0);
        CHECK(v <= m * peak + 1e-12);
      }
    }
    const auto ev = random_bernstein(5, 2, 3, rng);
    const std::vector<double> u{0.5, 0.5};
    CHECK_THROWS_AS(bernstein_partial_derivative(ev, u, 2), DomainError);
  }

  TEST_CASE("lattice derivatives match pointwise derivatives") {
    RngStream rng(41);
    const auto grid = make_grid(2, 5);
    for (int m : {0, 4}) {
      const auto pseudo = pseudo_observations(random_sample(16, 2, rng));
      const CopulaEvaluator ev =
          m == 0 ? CopulaEvaluator(pseudo) : CopulaEvaluator(pseudo, BernsteinOrder(m));
      const auto table = ev.lattice_partial_derivatives(grid.axis_values());
      for (std::size_t p = 0; p < grid.size(); ++p)
        for (int l = 0; l < 2; ++l)
          CHECK(std::abs(table(static_cast<Eigen::Index>(p), l) - ev.partial_derivative(grid.point(p), l)) <= 1e-14);
    }
  }

  TEST_CASE("empirical derivative is the clamped central difference") {
    RngStream rng(43);
    const auto pseudo = pseudo_observations(random_sample(25, 2, rng));
    const CopulaEvaluator ev(pseudo);
    const double h = 1.0 / 5.0;
    for (double x : {0.05, 0.5, 0.93}) {
      const std::vector<double> u{x, 0.6};
      const std::vector<double> hi{std::min(1.0, x + h), 0.6};
      const std::vector<double> lo{std::max(0.0, x - h), 0.6};
      const double expected = (empirical_copula_eval(pseudo, hi) - empirical_copula_eval(pseudo, lo)) / (2 * h);
      CHECK(ev.partial_derivative(u, 0) == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("Stieltjes masses") {
    const ProductStub stub(2);
    const auto one = stieltjes_cell_masses(stub, make_grid(2, 1));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 1.0);
    for (double mass : stieltjes_cell_masses(stub, make_grid(2, 2)))
      CHECK(mass == doctest::Approx(0.25).epsilon(1e-15));

    RngStream rng(47);
    const auto ev = random_bernstein(10, 2, 4, rng);
    const auto masses = stieltjes_cell_masses(ev, make_grid(2, 5));
    CHECK(std::abs(std::accumulate(masses.begin(), masses.end(), 0.0) - 1.0) <= 1e-10);
    CHECK_THROWS_AS(stieltjes_cell_masses(ev, make_grid(3, 2)), DomainError);
  }

  TEST_CASE("Stieltjes masses normalize for every mode and dimension") {
    RngStream rng(53);
    for (int rep = 0; rep < 20; ++rep) {
      const int d = 2 + rep % 2;
      const auto pseudo = pseudo_observations(random_sample(8 + rep, d, rng));
      for (int m : {0, 1 + rep % 7}) {
        const CopulaEvaluator ev =
            m == 0 ? CopulaEvaluator(pseudo) : CopulaEvaluator(pseudo, BernsteinOrder(m));
        const auto masses = stieltjes_cell_masses(ev, make_grid(d, 3 + rep % 5));
        CHECK(std::abs(std::accumulate(masses.begin(), masses.end(), 0.0) - 1.0) <= 1e-10);
        if (m == 0)
          for (double x : masses) CHECK(x >= -1e-15);
      }
    }
  }

  TEST_CASE("Stieltjes masses match direct inclusion-exclusion") {
    RngStream rng(59);
    const auto ev = random_bernstein(12, 3, 5, rng);
    const auto grid = make_grid(3, 4);
    const auto masses = stieltjes_cell_masses(ev, grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double mass = 0.0;
      for (int mask = 0; mask < 8; ++mask) {
        std::vector<double> corner(3);
        int lows = 0;
        for (int l = 0; l < 3; ++l) {
          const int j = grid.axis_index(p, l);
          const bool up = (mask >> l) & 1;
          corner[static_cast<std::size_t>(l)] = (j + (up ? 1 : 0)) / 4.0;
          lows += up ? 0 : 1;
        }
        mass += (lows % 2 ? -1.0 : 1.0) * bernstein_copula_eval_naive(ev, corner);
      }
      CHECK(std::abs(masses[p] - mass) <= 1e-12);
    }
  }
}

TEST_SUITE("statistical") {
  TEST_CASE("uniform error shrinks with n for the independence copula") {
    const auto grid = make_grid(2, 20);
    auto sup_error = [&](std::size_t n, RngStream& rng) {
      const auto s = random_sample(n, 2, rng);
      const CopulaEvaluator ev(pseudo_observations(s), BernsteinOrder(static_cast<int>(n / 5)));
      const auto surface = ev.evaluate_lattice(grid.axis_values());
      double worst = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto u = grid.point(p);
        worst = std::max(worst, std::abs(surface[p] - u[0] * u[1]));
      }
      return worst;
    };
    double small = 0.0, large = 0.0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      auto rng = RngStream(61).split(rep);
      small += sup_error(200, rng);
      large += sup_error(2000, rng);
    }
    MESSAGE("mean sup error n=200: " << small / 20 << ", n=2000: " << large / 20);
    CHECK(large <= 0.5 * small);
  }

  TEST_CASE("uniform error ratio with many replications") {
    const auto grid = make_grid(2, 20);
    auto sup_error = [&](std::size_t n, RngStream& rng) {
      const auto s = random_sample(n, 2, rng);
      const CopulaEvaluator ev(pseudo_observations(s), BernsteinOrder(static_cast<int>(n / 5)));
      const auto surface = ev.evaluate_lattice(grid.axis_values());
      double worst = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto u = grid.point(p);
        worst = std::max(worst, std::abs(surface[p] - u[0] * u[1]));
      }
      return worst;
    };
    double small = 0.0, large = 0.0;
    for (std::uint64_t rep = 0; rep < 400; ++rep) {
      auto rng = RngStream(62).split(rep);
      small += sup_error(200, rng);
      large += sup_error(2000, rng);
    }
    MESSAGE("ratio of mean sup errors over 400 replications: " << large / small);
    CHECK(large <= 0.5 * small);
  }
}
