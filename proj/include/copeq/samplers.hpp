#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "copeq/copula.hpp"
#include "copeq/rng.hpp"

namespace copeq {

enum class CopulaFamily { clayton, gaussian, independence };

std::string_view to_string(CopulaFamily family);
CopulaFamily parse_family(std::string_view name);

struct CopulaModel {
  CopulaFamily family = CopulaFamily::independence;
  int dim = 2;
  /// Clayton theta, or the common pairwise correlation for the Gaussian family.
  double parameter = 0.0;

  /// Throws DomainError when the parameter is outside the family's range.
  void validate() const;
};

/// Marshall-Olkin frailty construction; theta = 0 gives independent uniforms.
Sample sample_clayton(std::size_t n, int dim, double theta, RngStream& rng);

/// Equicorrelated Gaussian vectors on the raw (not probability-integral
/// transformed) scale; rank-based procedures are unaffected.
Sample sample_gaussian(std::size_t n, int dim, double rho, RngStream& rng);

Sample sample_independence(std::size_t n, int dim, RngStream& rng);

Sample sample_model(const CopulaModel& model, std::size_t n, RngStream& rng);

double clayton_theta_from_tau(double tau);
double gaussian_rho_from_tau(double tau);

/// (concordant - discordant) / (n (n - 1) / 2), ties counted as neither.
/// O(n log n) merge-sort count over the first two columns.
double sample_kendall_tau(const Sample& sample);

}  // namespace copeq
