#include "copeq/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "copeq/errors.hpp"

namespace copeq {

namespace {

std::vector<double> grid_difference(const CopulaSurface& c, const CopulaSurface& d,
                                    const EvaluationGrid& grid) {
  if (c.dim() != grid.dim() || d.dim() != grid.dim()) {
    throw DomainError("surface dimensions (" + std::to_string(c.dim()) + ", " +
                      std::to_string(d.dim()) + ") do not match grid dimension " +
                      std::to_string(grid.dim()));
  }
  auto diff = c.evaluate_lattice(grid.axis_values());
  const auto other = d.evaluate_lattice(grid.axis_values());
  for (std::size_t p = 0; p < diff.size(); ++p) diff[p] -= other[p];
  return diff;
}

}  // namespace

SampleSizes::SampleSizes(std::size_t first, std::size_t second) : n1(first), n2(second) {
  if (n1 == 0 || n2 == 0) throw DomainError("sample sizes must be positive");
}

double SampleSizes::lambda() const noexcept {
  return static_cast<double>(n1) / static_cast<double>(n1 + n2);
}

double SampleSizes::scale() const noexcept {
  return static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
}

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::R:
      return "R";
    case Statistic::S:
      return "S";
    case Statistic::T:
      return "T";
  }
  return "?";
}

double StatisticTriple::operator[](Statistic s) const noexcept {
  switch (s) {
    case Statistic::R:
      return R;
    case Statistic::S:
      return S;
    case Statistic::T:
      return T;
  }
  return 0.0;
}

StatisticTriple statistics_from_difference(std::span<const double> diff,
                                           std::span<const double> masses,
                                           const EvaluationGrid& grid, double scale) {
  if (diff.size() != grid.size() || masses.size() != grid.size()) {
    throw DomainError("process of length " + std::to_string(diff.size()) +
                      " does not match grid of " + std::to_string(grid.size()) + " points");
  }
  double lebesgue = 0.0;
  double stieltjes = 0.0;
  double sup = 0.0;
  for (std::size_t p = 0; p < diff.size(); ++p) {
    const double sq = diff[p] * diff[p];
    lebesgue += sq;
    stieltjes += masses[p] * sq;
    sup = std::max(sup, std::abs(diff[p]));
  }
  return {scale * grid.cell_volume() * lebesgue, scale * stieltjes, std::sqrt(scale) * sup};
}

double compute_R(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid) {
  return compute_statistics(c, d, sizes, grid).R;
}

double compute_S(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid) {
  return compute_statistics(c, d, sizes, grid).S;
}

double compute_T(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid) {
  return compute_statistics(c, d, sizes, grid).T;
}

StatisticTriple compute_statistics(const CopulaSurface& c, const CopulaSurface& d,
                                   const SampleSizes& sizes, const EvaluationGrid& grid) {
  const auto diff = grid_difference(c, d, grid);
  return statistics_from_difference(diff, stieltjes_cell_masses(c, grid), grid, sizes.scale());
}

}  // namespace copeq
