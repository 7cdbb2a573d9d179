#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "copeq/bernstein.hpp"

namespace copeq {

/// n x d matrix of finite observations, rows are observations.
class Sample {
 public:
  explicit Sample(Eigen::MatrixXd data);

  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  int dim() const noexcept { return static_cast<int>(data_.cols()); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  double operator()(std::size_t i, int l) const { return data_(static_cast<Eigen::Index>(i), l); }

  Sample rows(std::span<const std::size_t> indices) const;
  Sample columns(int first, int count) const;

 private:
  Eigen::MatrixXd data_;
};

/// Normalized ranks (1/n) #{j : X_jl <= X_il}. Ties share their maximal rank.
class PseudoSample {
 public:
  /// `ranks` holds the integer counts #{j : X_jl <= X_il}, each in 1..n.
  explicit PseudoSample(Eigen::MatrixXi ranks);

  std::size_t size() const noexcept { return static_cast<std::size_t>(ranks_.rows()); }
  int dim() const noexcept { return static_cast<int>(ranks_.cols()); }
  int rank(std::size_t i, int l) const { return ranks_(static_cast<Eigen::Index>(i), l); }
  double operator()(std::size_t i, int l) const {
    return static_cast<double>(rank(i, l)) / static_cast<double>(size());
  }
  const Eigen::MatrixXi& ranks() const noexcept { return ranks_; }

 private:
  Eigen::MatrixXi ranks_;
};

PseudoSample pseudo_observations(const Sample& sample);

/// Anything that can be evaluated as a function on [0,1]^d.
class CopulaSurface {
 public:
  virtual ~CopulaSurface() = default;
  virtual int dim() const = 0;
  virtual double evaluate(std::span<const double> u) const = 0;

  /// Values on the product lattice axis_values^d, last axis varying fastest.
  virtual std::vector<double> evaluate_lattice(std::span<const double> axis_values) const;
};

/// Empirical copula (no order) or empirical Bernstein copula of one sample.
///
/// Both estimators factor as C(u) = (1/n) sum_i prod_l phi_l(u_l, i), with
/// phi = 1(U_il <= u_l) for the empirical copula and phi = P(B >= ceil(m U_il))
/// for B ~ Binomial(m, u_l) in the Bernstein case. Everything downstream
/// (grids, multiplier processes, derivatives) is built on these factors.
class CopulaEvaluator final : public CopulaSurface {
 public:
  explicit CopulaEvaluator(PseudoSample pseudo, std::optional<BernsteinOrder> order = std::nullopt);

  int dim() const override { return pseudo_.dim(); }
  std::size_t size() const noexcept { return pseudo_.size(); }
  bool is_bernstein() const noexcept { return order_.has_value(); }
  std::optional<BernsteinOrder> order() const noexcept { return order_; }
  const PseudoSample& pseudo() const noexcept { return pseudo_; }
  /// ceil(m * U_il), in 1..m. Bernstein mode only.
  int ceil_index(std::size_t i, int l) const;

  double evaluate(std::span<const double> u) const override;
  std::vector<double> evaluate_lattice(std::span<const double> axis_values) const override;

  /// phi_l(x, i) for every observation i.
  void axis_factors(int axis, double x, std::span<double> out) const;
  /// d/dx phi_l(x, i) = m P_{k-1,m-1}(x). Bernstein mode only.
  void axis_derivative_factors(int axis, double x, std::span<double> out) const;

  /// n x L matrix whose column p is prod_l phi_l(u_pl, .) on the lattice.
  Eigen::MatrixXd lattice_factors(std::span<const double> axis_values) const;

  /// dC/du_axis: analytic for Bernstein. For the empirical copula,
  /// [C(u + h e) - C(u - h e)] / (2h) with h = 1/sqrt(n), the shifted
  /// arguments clamped to [0,1].
  double partial_derivative(std::span<const double> u, int axis) const;

  /// Partial derivatives at every lattice point, L x d.
  Eigen::MatrixXd lattice_partial_derivatives(std::span<const double> axis_values) const;

 private:
  void check_point(std::span<const double> u) const;

  PseudoSample pseudo_;
  std::optional<BernsteinOrder> order_;
  Eigen::MatrixXi ceil_;
};

double empirical_copula_eval(const PseudoSample& pseudo, std::span<const double> u);
double bernstein_copula_eval(const CopulaEvaluator& ev, std::span<const double> u);
/// Literal (m+1)^d nested sum over the empirical copula at k/m. Test oracle.
double bernstein_copula_eval_naive(const CopulaEvaluator& ev, std::span<const double> u);
/// `axis` is 0-based.
double bernstein_partial_derivative(const CopulaEvaluator& ev, std::span<const double> u, int axis);

/// Signed mass of each grid cell ((j-1)/g, j/g]^d by inclusion-exclusion of
/// the surface over the 2^d cell corners. Ordered like the grid points.
std::vector<double> stieltjes_cell_masses(const CopulaSurface& surface, const EvaluationGrid& grid);

/// Calls fn(p, prod) for each point p of the lattice, where prod[i] is the
/// product over axes of tables[l][j_l][i]. Lattice order matches EvaluationGrid.
template <class Fn>
void for_each_lattice_product(const std::vector<std::vector<std::vector<double>>>& tables,
                              std::size_t width, Fn&& fn);

}  // namespace copeq

#include "copeq/detail/lattice.ipp"
