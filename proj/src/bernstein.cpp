#include "copeq/bernstein.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "copeq/errors.hpp"

namespace copeq {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 32;

void check_unit(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("Bernstein argument must lie in [0,1], got " + std::to_string(u));
  }
}

}  // namespace

BernsteinOrder::BernsteinOrder(int m) : m_(m) {
  if (m < 1) {
    throw DomainError("Bernstein order must be >= 1, got " + std::to_string(m));
  }
}

std::vector<double> bernstein_weights_any(int degree, double u) {
  check_unit(u);
  if (degree < 0) {
    throw DomainError("Bernstein degree must be >= 0");
  }
  const auto size = static_cast<std::size_t>(degree) + 1;
  std::vector<double> w(size, 0.0);
  if (u == 0.0) {
    w.front() = 1.0;
    return w;
  }
  if (u == 1.0) {
    w.back() = 1.0;
    return w;
  }

  const double ratio = u / (1.0 - u);
  const int mode = std::min(degree, static_cast<int>(std::floor((degree + 1) * u)));
  w[static_cast<std::size_t>(mode)] = 1.0;
  // P_{k+1} / P_k = ((m - k) / (k + 1)) * u / (1 - u)
  for (int k = mode; k < degree; ++k) {
    w[k + 1] = w[k] * (static_cast<double>(degree - k) / (k + 1)) * ratio;
  }
  for (int k = mode; k > 0; --k) {
    w[k - 1] = w[k] * (static_cast<double>(k) / (degree - k + 1)) / ratio;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> bernstein_weights(BernsteinOrder m, double u) {
  return bernstein_weights_any(m.value(), u);
}

SurvivalTable::SurvivalTable(BernsteinOrder m, double u) {
  const auto w = bernstein_weights(m, u);
  tail_.assign(w.size() + 1, 0.0);
  for (std::size_t k = w.size(); k-- > 0;) {
    tail_[k] = tail_[k + 1] + w[k];
  }
  tail_[0] = 1.0;
  // Exact unit tail when the mass is concentrated at the top.
  if (u == 1.0) {
    for (std::size_t k = 0; k < w.size(); ++k) tail_[k] = 1.0;
  }
}

double binomial_survival(BernsteinOrder m, double u, int k) {
  if (k < 0 || k > m.value() + 1) {
    throw DomainError("survival index " + std::to_string(k) + " outside 0.." +
                      std::to_string(m.value() + 1));
  }
  return SurvivalTable(m, u).at(k);
}

std::size_t lattice_size(int dim, int per_axis, std::size_t limit) {
  if (dim < 1 || per_axis < 1) {
    throw DomainError("lattice needs dim >= 1 and points per axis >= 1");
  }
  std::size_t count = 1;
  for (int l = 0; l < dim; ++l) {
    if (count > limit / static_cast<std::size_t>(per_axis)) {
      throw CapacityError("grid of " + std::to_string(per_axis) + "^" + std::to_string(dim) +
                          " points exceeds capacity (d=" + std::to_string(dim) +
                          ", g=" + std::to_string(per_axis) + ")");
    }
    count *= static_cast<std::size_t>(per_axis);
  }
  return count;
}

EvaluationGrid::EvaluationGrid(int dim, int points_per_axis)
    : dim_(dim),
      g_(points_per_axis),
      count_(lattice_size(dim, points_per_axis, kMaxGridPoints)),
      cell_volume_(std::pow(static_cast<double>(points_per_axis), -dim)),
      axis_(static_cast<std::size_t>(points_per_axis)) {
  for (int j = 0; j < g_; ++j) {
    axis_[static_cast<std::size_t>(j)] = (j + 0.5) / g_;
  }
}

int EvaluationGrid::axis_index(std::size_t p, int axis) const {
  for (int l = dim_ - 1; l > axis; --l) {
    p /= static_cast<std::size_t>(g_);
  }
  return static_cast<int>(p % static_cast<std::size_t>(g_));
}

std::vector<double> EvaluationGrid::point(std::size_t p) const {
  std::vector<double> u(static_cast<std::size_t>(dim_));
  for (int l = dim_ - 1; l >= 0; --l) {
    u[static_cast<std::size_t>(l)] = axis_[p % static_cast<std::size_t>(g_)];
    p /= static_cast<std::size_t>(g_);
  }
  return u;
}

EvaluationGrid make_grid(int dim, int points_per_axis) {
  return EvaluationGrid(dim, points_per_axis);
}

}  // namespace copeq
