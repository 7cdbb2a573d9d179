#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "copeq/bernstein.hpp"
#include "copeq/copula.hpp"

namespace copeq {

struct SampleSizes {
  SampleSizes(std::size_t n1, std::size_t n2);

  std::size_t n1;
  std::size_t n2;

  /// n1 / (n1 + n2)
  double lambda() const noexcept;
  /// n2 * lambda, formed as n1 n2 / (n1 + n2).
  double scale() const noexcept;
};

enum class Statistic { R, S, T };
std::string_view to_string(Statistic s);

struct StatisticTriple {
  double R = 0.0;
  double S = 0.0;
  double T = 0.0;

  double operator[](Statistic s) const noexcept;
};

/// Statistics from surface values already tabulated on the grid.
///
/// `masses` are the Stieltjes cell masses of the first surface and `scale`
/// multiplies the squared integrands (its square root multiplies T).
StatisticTriple statistics_from_difference(std::span<const double> diff,
                                           std::span<const double> masses,
                                           const EvaluationGrid& grid, double scale);

double compute_R(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid);
double compute_S(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid);
double compute_T(const CopulaSurface& c, const CopulaSurface& d, const SampleSizes& sizes,
                 const EvaluationGrid& grid);
StatisticTriple compute_statistics(const CopulaSurface& c, const CopulaSurface& d,
                                   const SampleSizes& sizes, const EvaluationGrid& grid);

}  // namespace copeq
