#include "copeq/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "copeq/errors.hpp"

namespace copeq {

namespace {

constexpr std::size_t kNaiveTermLimit = 10'000'000;

std::vector<std::vector<std::vector<double>>> factor_tables(const CopulaEvaluator& ev,
                                                            std::span<const double> axis_values) {
  const std::size_t n = ev.size();
  std::vector<std::vector<std::vector<double>>> tables(static_cast<std::size_t>(ev.dim()));
  for (int l = 0; l < ev.dim(); ++l) {
    auto& axis = tables[static_cast<std::size_t>(l)];
    axis.assign(axis_values.size(), std::vector<double>(n));
    for (std::size_t j = 0; j < axis_values.size(); ++j) {
      ev.axis_factors(l, axis_values[j], axis[j]);
    }
  }
  return tables;
}

}  // namespace

Sample::Sample(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < 2) {
    throw DomainError("a sample needs at least 2 observations, got " + std::to_string(data_.rows()));
  }
  if (data_.cols() < 2) {
    throw DomainError("a sample needs at least 2 columns, got " + std::to_string(data_.cols()));
  }
  if (!data_.allFinite()) {
    throw DomainError("sample contains non-finite entries");
  }
}

Sample Sample::rows(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), data_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw DomainError("row index out of range");
    out.row(static_cast<Eigen::Index>(r)) = data_.row(static_cast<Eigen::Index>(indices[r]));
  }
  return Sample(std::move(out));
}

Sample Sample::columns(int first, int count) const {
  if (first < 0 || count < 0 || first + count > dim()) throw DomainError("column range out of bounds");
  return Sample(data_.middleCols(first, count));
}

PseudoSample::PseudoSample(Eigen::MatrixXi ranks) : ranks_(std::move(ranks)) {
  const auto n = static_cast<int>(ranks_.rows());
  if (n < 2 || ranks_.cols() < 1) throw DomainError("pseudo-sample needs at least 2 rows");
  if (ranks_.minCoeff() < 1 || ranks_.maxCoeff() > n) {
    throw DomainError("pseudo-sample ranks must lie in 1..n");
  }
}

PseudoSample pseudo_observations(const Sample& sample) {
  const std::size_t n = sample.size();
  Eigen::MatrixXi ranks(static_cast<Eigen::Index>(n), sample.dim());
  std::vector<std::size_t> order(n);
  for (int l = 0; l < sample.dim(); ++l) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample(a, l) < sample(b, l); });
    // A run of tied values receives the position of its last member.
    std::size_t start = 0;
    while (start < n) {
      std::size_t stop = start + 1;
      while (stop < n && sample(order[stop], l) == sample(order[start], l)) ++stop;
      for (std::size_t k = start; k < stop; ++k) {
        ranks(static_cast<Eigen::Index>(order[k]), l) = static_cast<int>(stop);
      }
      start = stop;
    }
  }
  return PseudoSample(std::move(ranks));
}

std::vector<double> CopulaSurface::evaluate_lattice(std::span<const double> axis_values) const {
  const int d = dim();
  const std::size_t per_axis = axis_values.size();
  const std::size_t count = lattice_size(d, static_cast<int>(per_axis), std::size_t{1} << 32);
  std::vector<double> out(count);
  std::vector<double> u(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t rest = p;
    for (int l = d - 1; l >= 0; --l) {
      u[static_cast<std::size_t>(l)] = axis_values[rest % per_axis];
      rest /= per_axis;
    }
    out[p] = evaluate(u);
  }
  return out;
}

CopulaEvaluator::CopulaEvaluator(PseudoSample pseudo, std::optional<BernsteinOrder> order)
    : pseudo_(std::move(pseudo)), order_(order) {
  if (order_) {
    const long long m = order_->value();
    const long long n = static_cast<long long>(pseudo_.size());
    ceil_.resize(pseudo_.ranks().rows(), pseudo_.ranks().cols());
    for (Eigen::Index i = 0; i < ceil_.rows(); ++i) {
      for (Eigen::Index l = 0; l < ceil_.cols(); ++l) {
        // ceil(m r / n) in exact integer arithmetic
        ceil_(i, l) = static_cast<int>((m * pseudo_.ranks()(i, l) + n - 1) / n);
      }
    }
  }
}

int CopulaEvaluator::ceil_index(std::size_t i, int l) const {
  if (!order_) throw DomainError("ceil indices exist only for Bernstein evaluators");
  return ceil_(static_cast<Eigen::Index>(i), l);
}

void CopulaEvaluator::check_point(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) {
    throw DomainError("point has dimension " + std::to_string(u.size()) + ", evaluator has " +
                      std::to_string(dim()));
  }
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("evaluation point outside [0,1]^d");
  }
}

void CopulaEvaluator::axis_factors(int axis, double x, std::span<double> out) const {
  const std::size_t n = size();
  if (order_) {
    const SurvivalTable tail(*order_, x);
    for (std::size_t i = 0; i < n; ++i) out[i] = tail.at(ceil_(static_cast<Eigen::Index>(i), axis));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = pseudo_(i, axis) <= x ? 1.0 : 0.0;
  }
}

void CopulaEvaluator::axis_derivative_factors(int axis, double x, std::span<double> out) const {
  if (!order_) throw DomainError("analytic derivatives need a Bernstein evaluator");
  const int m = order_->value();
  const auto w = bernstein_weights_any(m - 1, x);
  for (std::size_t i = 0; i < size(); ++i) {
    const int k = ceil_(static_cast<Eigen::Index>(i), axis);
    out[i] = m * w[static_cast<std::size_t>(k - 1)];
  }
}

double CopulaEvaluator::evaluate(std::span<const double> u) const {
  check_point(u);
  const std::size_t n = size();
  std::vector<double> prod(n, 1.0);
  std::vector<double> f(n);
  for (int l = 0; l < dim(); ++l) {
    axis_factors(l, u[static_cast<std::size_t>(l)], f);
    for (std::size_t i = 0; i < n; ++i) prod[i] *= f[i];
  }
  return std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(n);
}

std::vector<double> CopulaEvaluator::evaluate_lattice(std::span<const double> axis_values) const {
  const std::size_t count =
      lattice_size(dim(), static_cast<int>(axis_values.size()), std::size_t{1} << 32);
  std::vector<double> out(count);
  const double n = static_cast<double>(size());
  for_each_lattice_product(factor_tables(*this, axis_values), size(),
                           [&](std::size_t p, const std::vector<double>& prod) {
                             out[p] = std::accumulate(prod.begin(), prod.end(), 0.0) / n;
                           });
  return out;
}

Eigen::MatrixXd CopulaEvaluator::lattice_factors(std::span<const double> axis_values) const {
  const std::size_t count =
      lattice_size(dim(), static_cast<int>(axis_values.size()), std::size_t{1} << 32);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(count));
  for_each_lattice_product(factor_tables(*this, axis_values), size(),
                           [&](std::size_t p, const std::vector<double>& prod) {
                             out.col(static_cast<Eigen::Index>(p)) =
                                 Eigen::Map<const Eigen::VectorXd>(prod.data(), prod.size());
                           });
  return out;
}

double CopulaEvaluator::partial_derivative(std::span<const double> u, int axis) const {
  check_point(u);
  if (axis < 0 || axis >= dim()) {
    throw DomainError("axis " + std::to_string(axis) + " out of range for dimension " +
                      std::to_string(dim()));
  }
  const std::size_t n = size();
  if (!order_) {
    const double h = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> lo(u.begin(), u.end());
    std::vector<double> hi(u.begin(), u.end());
    const auto a = static_cast<std::size_t>(axis);
    lo[a] = std::max(0.0, u[a] - h);
    hi[a] = std::min(1.0, u[a] + h);
    return (evaluate(hi) - evaluate(lo)) / (2.0 * h);
  }
  std::vector<double> prod(n);
  std::vector<double> f(n);
  axis_derivative_factors(axis, u[static_cast<std::size_t>(axis)], prod);
  for (int l = 0; l < dim(); ++l) {
    if (l == axis) continue;
    axis_factors(l, u[static_cast<std::size_t>(l)], f);
    for (std::size_t i = 0; i < n; ++i) prod[i] *= f[i];
  }
  return std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(n);
}

Eigen::MatrixXd CopulaEvaluator::lattice_partial_derivatives(
    std::span<const double> axis_values) const {
  const int d = dim();
  const std::size_t per_axis = axis_values.size();
  const std::size_t count = lattice_size(d, static_cast<int>(per_axis), std::size_t{1} << 32);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), d);
  if (!order_) {
    std::vector<double> u(static_cast<std::size_t>(d));
    for (std::size_t p = 0; p < count; ++p) {
      std::size_t rest = p;
      for (int l = d - 1; l >= 0; --l) {
        u[static_cast<std::size_t>(l)] = axis_values[rest % per_axis];
        rest /= per_axis;
      }
      for (int l = 0; l < d; ++l) out(static_cast<Eigen::Index>(p), l) = partial_derivative(u, l);
    }
    return out;
  }
  const auto tables = factor_tables(*this, axis_values);
  const double n = static_cast<double>(size());
  for (int axis = 0; axis < d; ++axis) {
    auto swapped = tables;
    auto& row = swapped[static_cast<std::size_t>(axis)];
    for (std::size_t j = 0; j < per_axis; ++j) axis_derivative_factors(axis, axis_values[j], row[j]);
    for_each_lattice_product(swapped, size(), [&](std::size_t p, const std::vector<double>& prod) {
      out(static_cast<Eigen::Index>(p), axis) = std::accumulate(prod.begin(), prod.end(), 0.0) / n;
    });
  }
  return out;
}

double empirical_copula_eval(const PseudoSample& pseudo, std::span<const double> u) {
  if (static_cast<int>(u.size()) != pseudo.dim()) {
    throw DomainError("point has dimension " + std::to_string(u.size()) + ", pseudo-sample has " +
                      std::to_string(pseudo.dim()));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pseudo.size(); ++i) {
    bool inside = true;
    for (int l = 0; l < pseudo.dim() && inside; ++l) {
      inside = pseudo(i, l) <= u[static_cast<std::size_t>(l)];
    }
    hits += inside ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(pseudo.size());
}

double bernstein_copula_eval(const CopulaEvaluator& ev, std::span<const double> u) {
  if (!ev.is_bernstein()) throw DomainError("evaluator has no Bernstein order");
  return ev.evaluate(u);
}

double bernstein_copula_eval_naive(const CopulaEvaluator& ev, std::span<const double> u) {
  if (!ev.is_bernstein()) throw DomainError("evaluator has no Bernstein order");
  if (static_cast<int>(u.size()) != ev.dim()) throw DomainError("dimension mismatch");
  const int m = ev.order()->value();
  const int d = ev.dim();
  const std::size_t terms = lattice_size(d, m + 1, kNaiveTermLimit);

  std::vector<std::vector<double>> weights;
  for (int l = 0; l < d; ++l) weights.push_back(bernstein_weights(*ev.order(), u[static_cast<std::size_t>(l)]));

  std::vector<double> knot(static_cast<std::size_t>(d));
  double total = 0.0;
  for (std::size_t t = 0; t < terms; ++t) {
    std::size_t rest = t;
    double w = 1.0;
    for (int l = d - 1; l >= 0; --l) {
      const auto k = rest % static_cast<std::size_t>(m + 1);
      rest /= static_cast<std::size_t>(m + 1);
      knot[static_cast<std::size_t>(l)] = static_cast<double>(k) / m;
      w *= weights[static_cast<std::size_t>(l)][k];
    }
    if (w != 0.0) total += empirical_copula_eval(ev.pseudo(), knot) * w;
  }
  return total;
}

double bernstein_partial_derivative(const CopulaEvaluator& ev, std::span<const double> u, int axis) {
  if (!ev.is_bernstein()) throw DomainError("evaluator has no Bernstein order");
  return ev.partial_derivative(u, axis);
}

std::vector<double> stieltjes_cell_masses(const CopulaSurface& surface, const EvaluationGrid& grid) {
  if (surface.dim() != grid.dim()) {
    throw DomainError("surface dimension " + std::to_string(surface.dim()) +
                      " does not match grid dimension " + std::to_string(grid.dim()));
  }
  const int d = grid.dim();
  const int g = grid.points_per_axis();
  std::vector<double> knots(static_cast<std::size_t>(g) + 1);
  for (int j = 0; j <= g; ++j) knots[static_cast<std::size_t>(j)] = static_cast<double>(j) / g;
  knots.back() = 1.0;
  const auto corner = surface.evaluate_lattice(knots);

  std::vector<double> masses(grid.size(), 0.0);
  const auto stride = static_cast<std::size_t>(g) + 1;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double mass = 0.0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      std::size_t flat = 0;
      int lower = 0;
      for (int l = 0; l < d; ++l) {
        const bool upper = (mask >> l) & 1u;
        lower += upper ? 0 : 1;
        flat = flat * stride + static_cast<std::size_t>(grid.axis_index(p, l) + (upper ? 1 : 0));
      }
      mass += (lower % 2 == 0 ? 1.0 : -1.0) * corner[flat];
    }
    masses[p] = mass;
  }
  return masses;
}

}  // namespace copeq
