#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "copeq/errors.hpp"
#include "copeq/resampling.hpp"

namespace copeq {

void SubsampleConfig::validate(std::size_t n1, std::size_t n2) const {
  auto check = [](std::size_t b, std::size_t n, const char* name) {
    if (b < 2 || b >= n) {
      throw ConfigError(std::string("subsample size ") + name + "=" + std::to_string(b) +
                        " must satisfy 2 <= b < n=" + std::to_string(n));
    }
  };
  check(b1, n1, "b1");
  check(b2, n2, "b2");
  if (m_sub1 < 1 || m_sub2 < 1) throw ConfigError("subsample Bernstein orders must be >= 1");
  if (H < 1) throw ConfigError("subsample replicate count must be >= 1");
}

std::vector<std::size_t> draw_subsample_indices(std::size_t n, std::size_t b, RngStream& rng) {
  if (b < 2 || b >= n) {
    throw DomainError("subsample size b=" + std::to_string(b) + " must satisfy 2 <= b < n=" +
                      std::to_string(n));
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first b slots end up a uniform b-subset.
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(b);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<double> subsample_replicate_process(std::span<const double> full_surface,
                                                const Sample& sub_rows,
                                                std::optional<BernsteinOrder> m_sub,
                                                std::size_t n, const EvaluationGrid& grid) {
  const std::size_t b = sub_rows.size();
  if (b >= n) {
    throw DomainError("subsample of " + std::to_string(b) + " rows is not smaller than n=" +
                      std::to_string(n));
  }
  if (full_surface.size() != grid.size()) throw DomainError("full surface is not aligned with the grid");
  const CopulaEvaluator sub(pseudo_observations(sub_rows), m_sub);
  auto out = sub.evaluate_lattice(grid.axis_values());
  const double bd = static_cast<double>(b);
  const double factor = std::sqrt(bd / (1.0 - bd / static_cast<double>(n)));
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = factor * (out[p] - full_surface[p]);
  return out;
}

std::vector<double> subsample_replicate_process(const CopulaEvaluator& full_ev,
                                                const Sample& sub_rows,
                                                std::optional<BernsteinOrder> m_sub,
                                                std::size_t n, std::size_t b,
                                                const EvaluationGrid& grid) {
  if (sub_rows.size() != b) throw DomainError("subsample row count does not match b");
  if (full_ev.size() != n) throw DomainError("full evaluator size does not match n");
  const auto full = full_ev.evaluate_lattice(grid.axis_values());
  return subsample_replicate_process(full, sub_rows, m_sub, n, grid);
}

MethodResult subsample_from_bases(const Sample& x, const Sample& y, const ProcessBasis& c,
                                  const ProcessBasis& d, const SubsampleConfig& cfg,
                                  Smoothing mode, Coupling coupling, const RngStream& rng) {
  cfg.validate(x.size(), y.size());
  if (coupling == Coupling::paired && (x.size() != y.size() || cfg.b1 != cfg.b2)) {
    throw ConfigError("paired subsampling needs equal sample and subsample sizes");
  }
  const SampleSizes sizes(x.size(), y.size());
  const double lambda_b = static_cast<double>(cfg.b1) / static_cast<double>(cfg.b1 + cfg.b2);
  std::optional<BernsteinOrder> order1;
  std::optional<BernsteinOrder> order2;
  if (mode == Smoothing::bernstein) {
    order1 = BernsteinOrder(cfg.m_sub1);
    order2 = BernsteinOrder(cfg.m_sub2);
  }

  MethodResult result;
  result.observed = observed_statistics(c, d, sizes);
  result.replicates_R.resize(cfg.H);
  result.replicates_S.resize(cfg.H);
  result.replicates_T.resize(cfg.H);
  for (std::size_t h = 0; h < cfg.H; ++h) {
    const auto stream = rng.split(h);
    auto first_stream = stream.split(0);
    const auto idx1 = draw_subsample_indices(x.size(), cfg.b1, first_stream);
    std::vector<std::size_t> idx2;
    if (coupling == Coupling::paired) {
      idx2 = idx1;
    } else {
      auto second_stream = stream.split(1);
      idx2 = draw_subsample_indices(y.size(), cfg.b2, second_stream);
    }
    const auto proc_c = subsample_replicate_process(c.surface(), x.rows(idx1), order1, x.size(), c.grid());
    const auto proc_d = subsample_replicate_process(d.surface(), y.rows(idx2), order2, y.size(), d.grid());
    const auto rep = replicate_statistics(proc_c, proc_d, lambda_b, c.masses(), c.grid());
    result.replicates_R[h] = rep.R;
    result.replicates_S[h] = rep.S;
    result.replicates_T[h] = rep.T;
  }
  result.p_values = {p_value(result.observed.R, result.replicates_R),
                     p_value(result.observed.S, result.replicates_S),
                     p_value(result.observed.T, result.replicates_T)};
  return result;
}

MethodResult subsample_test(const Sample& x, const Sample& y, const SubsampleConfig& cfg,
                            Smoothing mode, std::pair<int, int> orders,
                            const EvaluationGrid& grid, const RngStream& rng, Coupling coupling) {
  if (x.dim() != y.dim() || x.dim() != grid.dim()) {
    throw DomainError("samples of dimension " + std::to_string(x.dim()) + " and " +
                      std::to_string(y.dim()) + " on a grid of dimension " +
                      std::to_string(grid.dim()));
  }
  const auto evC = make_evaluator(x, mode, orders.first);
  const auto evD = make_evaluator(y, mode, orders.second);
  const ProcessBasis c(evC, grid);
  const ProcessBasis d(evD, grid);
  return subsample_from_bases(x, y, c, d, cfg, mode, coupling, rng);
}

}  // namespace copeq
