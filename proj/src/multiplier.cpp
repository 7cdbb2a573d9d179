#include <algorithm>
#include <cmath>
#include <string>

#include "copeq/errors.hpp"
#include "copeq/resampling.hpp"

namespace copeq {

std::string_view to_string(Smoothing s) {
  return s == Smoothing::bernstein ? "bernstein" : "empirical";
}

std::string_view to_string(Method m) {
  return m == Method::multiplier ? "multiplier" : "subsample";
}

std::span<const double> MethodResult::replicates(Statistic s) const {
  switch (s) {
    case Statistic::R:
      return replicates_R;
    case Statistic::S:
      return replicates_S;
    case Statistic::T:
      return replicates_T;
  }
  return {};
}

double p_value(double observed, std::span<const double> replicates) {
  if (replicates.empty()) throw DomainError("p-value needs at least one replicate");
  const auto hits = std::count_if(replicates.begin(), replicates.end(),
                                  [&](double r) { return r >= observed; });
  return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

CopulaEvaluator make_evaluator(const Sample& sample, Smoothing mode, int order) {
  auto pseudo = pseudo_observations(sample);
  if (mode == Smoothing::empirical) return CopulaEvaluator(std::move(pseudo));
  return CopulaEvaluator(std::move(pseudo), BernsteinOrder(order));
}

ProcessBasis::ProcessBasis(const CopulaEvaluator& ev, const EvaluationGrid& grid)
    : grid_(&grid), n_(ev.size()) {
  if (ev.dim() != grid.dim()) {
    throw DomainError("evaluator dimension " + std::to_string(ev.dim()) +
                      " does not match grid dimension " + std::to_string(grid.dim()));
  }
  const auto axis = grid.axis_values();
  factors_ = ev.lattice_factors(axis);
  margins_.reserve(static_cast<std::size_t>(grid.dim()));
  for (int l = 0; l < grid.dim(); ++l) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(axis.size()));
    for (std::size_t j = 0; j < axis.size(); ++j) {
      ev.axis_factors(l, axis[j], std::span<double>(m.col(static_cast<Eigen::Index>(j)).data(), n_));
    }
    margins_.push_back(std::move(m));
  }
  derivatives_ = ev.lattice_partial_derivatives(axis);
  const Eigen::VectorXd means = factors_.colwise().mean();
  surface_.assign(means.data(), means.data() + means.size());
  masses_ = stieltjes_cell_masses(ev, grid);
}

Eigen::MatrixXd ProcessBasis::g_hat(const Eigen::MatrixXd& xi) const {
  if (static_cast<std::size_t>(xi.rows()) != n_) {
    throw DomainError("multiplier vector of length " + std::to_string(xi.rows()) +
                      " does not match sample size " + std::to_string(n_));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  return scale * (factors_.transpose() * xi);
}

Eigen::MatrixXd ProcessBasis::replicate_processes(const Eigen::MatrixXd& xi) const {
  Eigen::MatrixXd out = g_hat(xi);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  const int d = grid_->dim();
  for (int l = 0; l < d; ++l) {
    const Eigen::MatrixXd margin = scale * (margins_[static_cast<std::size_t>(l)].transpose() * xi);
    for (Eigen::Index p = 0; p < out.rows(); ++p) {
      const int j = grid_->axis_index(static_cast<std::size_t>(p), l);
      out.row(p) -= derivatives_(p, l) * margin.row(j);
    }
  }
  return out;
}

std::vector<MultiplierBlock> draw_centered_multipliers(std::size_t n1, std::size_t n2,
                                                       std::size_t H, const RngStream& rng) {
  if (n1 < 2 || n2 < 2) throw DomainError("multiplier blocks need sizes >= 2");
  std::vector<MultiplierBlock> blocks(H);
  for (std::size_t h = 0; h < H; ++h) {
    auto stream = rng.split(h);
    auto& block = blocks[h];
    block.first.resize(static_cast<Eigen::Index>(n1));
    block.second.resize(static_cast<Eigen::Index>(n2));
    for (auto& x : block.first) x = stream.exponential();
    for (auto& x : block.second) x = stream.exponential();
    block.first.array() -= block.first.mean();
    block.second.array() -= block.second.mean();
  }
  return blocks;
}

std::vector<MultiplierBlock> draw_paired_multipliers(std::size_t n, std::size_t H,
                                                     const RngStream& rng) {
  if (n < 2) throw DomainError("multiplier blocks need sizes >= 2");
  std::vector<MultiplierBlock> blocks(H);
  for (std::size_t h = 0; h < H; ++h) {
    auto stream = rng.split(h);
    auto& block = blocks[h];
    block.first.resize(static_cast<Eigen::Index>(n));
    for (auto& x : block.first) x = stream.exponential();
    block.first.array() -= block.first.mean();
    block.second = block.first;
  }
  return blocks;
}

std::vector<double> g_hat_process(const CopulaEvaluator& ev, std::span<const double> xi_centered,
                                  const std::vector<std::vector<double>>& points) {
  const std::size_t n = ev.size();
  if (xi_centered.size() != n) {
    throw DomainError("multiplier vector of length " + std::to_string(xi_centered.size()) +
                      " does not match sample size " + std::to_string(n));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> out;
  out.reserve(points.size());
  std::vector<double> prod(n);
  std::vector<double> f(n);
  for (const auto& u : points) {
    if (static_cast<int>(u.size()) != ev.dim()) throw DomainError("point dimension mismatch");
    std::fill(prod.begin(), prod.end(), 1.0);
    for (int l = 0; l < ev.dim(); ++l) {
      ev.axis_factors(l, u[static_cast<std::size_t>(l)], f);
      for (std::size_t i = 0; i < n; ++i) prod[i] *= f[i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += xi_centered[i] * prod[i];
    out.push_back(scale * total);
  }
  return out;
}

std::vector<double> replicate_process_C(const CopulaEvaluator& ev,
                                        std::span<const double> xi_centered,
                                        const EvaluationGrid& grid) {
  const ProcessBasis basis(ev, grid);
  if (xi_centered.size() != basis.size()) {
    throw DomainError("multiplier vector length does not match sample size");
  }
  const Eigen::MatrixXd xi =
      Eigen::Map<const Eigen::VectorXd>(xi_centered.data(), static_cast<Eigen::Index>(xi_centered.size()));
  const Eigen::MatrixXd proc = basis.replicate_processes(xi);
  return {proc.data(), proc.data() + proc.size()};
}

StatisticTriple replicate_statistics(std::span<const double> repC, std::span<const double> repD,
                                     double lambda, std::span<const double> masses,
                                     const EvaluationGrid& grid) {
  if (repC.size() != grid.size() || repD.size() != grid.size()) {
    throw DomainError("replicate processes are not aligned with the grid");
  }
  const double wc = std::sqrt(1.0 - lambda);
  const double wd = std::sqrt(lambda);
  std::vector<double> f(repC.size());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = wc * repC[p] - wd * repD[p];
  return statistics_from_difference(f, masses, grid, 1.0);
}

StatisticTriple replicate_statistics(std::span<const double> repC, std::span<const double> repD,
                                     const SampleSizes& sizes, const CopulaEvaluator& evC,
                                     const EvaluationGrid& grid) {
  const auto masses = stieltjes_cell_masses(evC, grid);
  return replicate_statistics(repC, repD, sizes.lambda(), masses, grid);
}

StatisticTriple observed_statistics(const ProcessBasis& c, const ProcessBasis& d,
                                    const SampleSizes& sizes) {
  std::vector<double> diff(c.surface().size());
  for (std::size_t p = 0; p < diff.size(); ++p) diff[p] = c.surface()[p] - d.surface()[p];
  return statistics_from_difference(diff, c.masses(), c.grid(), sizes.scale());
}

namespace {

void finish(MethodResult& result) {
  result.p_values = {p_value(result.observed.R, result.replicates_R),
                     p_value(result.observed.S, result.replicates_S),
                     p_value(result.observed.T, result.replicates_T)};
}

}  // namespace

MethodResult multiplier_from_blocks(const ProcessBasis& c, const ProcessBasis& d,
                                    std::span<const MultiplierBlock> blocks) {
  const SampleSizes sizes(c.size(), d.size());
  MethodResult result;
  result.observed = observed_statistics(c, d, sizes);
  const std::size_t H = blocks.size();
  if (H == 0) throw DomainError("at least one multiplier replicate is required");

  Eigen::MatrixXd xi_c(static_cast<Eigen::Index>(c.size()), static_cast<Eigen::Index>(H));
  Eigen::MatrixXd xi_d(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(H));
  for (std::size_t h = 0; h < H; ++h) {
    xi_c.col(static_cast<Eigen::Index>(h)) = blocks[h].first;
    xi_d.col(static_cast<Eigen::Index>(h)) = blocks[h].second;
  }
  const Eigen::MatrixXd proc_c = c.replicate_processes(xi_c);
  const Eigen::MatrixXd proc_d = d.replicate_processes(xi_d);

  result.replicates_R.resize(H);
  result.replicates_S.resize(H);
  result.replicates_T.resize(H);
  const auto G = static_cast<std::size_t>(proc_c.rows());
  for (std::size_t h = 0; h < H; ++h) {
    const auto col = static_cast<Eigen::Index>(h);
    const auto rep = replicate_statistics(std::span<const double>(proc_c.col(col).data(), G),
                                          std::span<const double>(proc_d.col(col).data(), G),
                                          sizes.lambda(), c.masses(), c.grid());
    result.replicates_R[h] = rep.R;
    result.replicates_S[h] = rep.S;
    result.replicates_T[h] = rep.T;
  }
  finish(result);
  return result;
}

MethodResult multiplier_test(const Sample& x, const Sample& y, Smoothing mode,
                             std::pair<int, int> orders, std::size_t H,
                             const EvaluationGrid& grid, const RngStream& rng) {
  if (x.dim() != y.dim() || x.dim() != grid.dim()) {
    throw DomainError("samples of dimension " + std::to_string(x.dim()) + " and " +
                      std::to_string(y.dim()) + " on a grid of dimension " +
                      std::to_string(grid.dim()));
  }
  const auto evC = make_evaluator(x, mode, orders.first);
  const auto evD = make_evaluator(y, mode, orders.second);
  const ProcessBasis c(evC, grid);
  const ProcessBasis d(evD, grid);
  const auto blocks = draw_centered_multipliers(x.size(), y.size(), H, rng);
  auto result = multiplier_from_blocks(c, d, blocks);
  if (mode == Smoothing::bernstein) {
    if (static_cast<std::size_t>(orders.first) >= x.size() ||
        static_cast<std::size_t>(orders.second) >= y.size()) {
      result.warnings.emplace_back(
          "Bernstein order m >= n: the multiplier bootstrap is not justified for the empirical "
          "beta copula; consider subsampling");
    }
  }
  return result;
}

}  // namespace copeq
