#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "copeq/copula.hpp"
#include "copeq/rng.hpp"

namespace copeq::testing {

// Continuous uniform data; ties occur with probability zero.
inline Sample random_sample(std::size_t n, int d, RngStream& rng) {
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index l = 0; l < d; ++l) data(i, l) = rng.uniform();
  return Sample(std::move(data));
}

inline std::vector<double> random_point(int d, RngStream& rng) {
  std::vector<double> u(static_cast<std::size_t>(d));
  for (auto& x : u) x = rng.uniform();
  return u;
}

inline double binom(int m, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (m - k + j) / j;
  return c;
}

inline double bernstein_pmf(int m, int k, double u) {
  if (k < 0 || k > m) return 0.0;
  return binom(m, k) * std::pow(u, k) * std::pow(1.0 - u, m - k);
}

// C_n(u) straight from the indicator definition.
inline double direct_empirical(const Sample& s, const std::vector<double>& u) {
  const auto n = s.size();
  double hits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bool in = true;
    for (int l = 0; l < s.dim(); ++l) {
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) count += s(j, l) <= s(i, l) ? 1 : 0;
      if (static_cast<double>(count) / static_cast<double>(n) > u[static_cast<std::size_t>(l)]) in = false;
    }
    hits += in ? 1.0 : 0.0;
  }
  return hits / static_cast<double>(n);
}

}  // namespace copeq::testing
