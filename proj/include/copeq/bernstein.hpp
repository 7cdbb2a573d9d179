#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace copeq {

/// Degree of a Bernstein smoother. Always at least one.
class BernsteinOrder {
 public:
  explicit BernsteinOrder(int m);
  int value() const noexcept { return m_; }
  friend bool operator==(BernsteinOrder, BernsteinOrder) = default;

 private:
  int m_;
};

/// Binomial(m, u) probability masses P_{0,m}(u) .. P_{m,m}(u).
///
/// Computed from the mode outwards with the ratio recurrence and then
/// normalized, so neither factorials nor (1-u)^m are ever formed and
/// large orders do not underflow at the centre of the distribution.
std::vector<double> bernstein_weights(BernsteinOrder m, double u);

/// Same as bernstein_weights but also accepts degree zero (returns {1}).
std::vector<double> bernstein_weights_any(int degree, double u);

/// P(B >= k) for B ~ Binomial(m, u), 0 <= k <= m + 1.
double binomial_survival(BernsteinOrder m, double u, int k);

/// Suffix sums of the Bernstein weights for one (m, u) pair.
///
/// at(k) == P(B >= k). at(0) is exactly one and at(m + 1) exactly zero.
class SurvivalTable {
 public:
  SurvivalTable(BernsteinOrder m, double u);
  double at(int k) const { return tail_[static_cast<std::size_t>(k)]; }
  int order() const noexcept { return static_cast<int>(tail_.size()) - 2; }

 private:
  std::vector<double> tail_;
};

/// Midpoint lattice ((j - 0.5) / g per axis) on the unit cube.
///
/// Points are stored row-major with the last axis varying fastest.
class EvaluationGrid {
 public:
  EvaluationGrid(int dim, int points_per_axis);

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return g_; }
  std::size_t size() const noexcept { return count_; }
  double cell_volume() const noexcept { return cell_volume_; }

  /// Coordinate values along one axis (identical for every axis).
  std::span<const double> axis_values() const { return axis_; }
  /// Axis index j_l (0-based) of point p along axis l.
  int axis_index(std::size_t p, int axis) const;
  /// The d coordinates of point p.
  std::vector<double> point(std::size_t p) const;

 private:
  int dim_;
  int g_;
  std::size_t count_;
  double cell_volume_;
  std::vector<double> axis_;
};

EvaluationGrid make_grid(int dim, int points_per_axis);

/// Number of lattice points n^d, throwing CapacityError on overflow or when
/// the count exceeds `limit`.
std::size_t lattice_size(int dim, int per_axis, std::size_t limit);

}  // namespace copeq
