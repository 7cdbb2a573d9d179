#include "copeq/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "copeq/errors.hpp"

namespace copeq {

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::clayton:
      return "clayton";
    case CopulaFamily::gaussian:
      return "gaussian";
    case CopulaFamily::independence:
      return "independence";
  }
  return "unknown";
}

CopulaFamily parse_family(std::string_view name) {
  if (name == "clayton") return CopulaFamily::clayton;
  if (name == "gaussian") return CopulaFamily::gaussian;
  if (name == "independence") return CopulaFamily::independence;
  throw ConfigError("unknown copula family '" + std::string(name) + "'");
}

void CopulaModel::validate() const {
  if (dim < 2) throw DomainError("copula dimension must be >= 2");
  switch (family) {
    case CopulaFamily::clayton:
      if (!(parameter >= 0.0) || !std::isfinite(parameter)) {
        throw DomainError("Clayton theta must be >= 0, got " + std::to_string(parameter));
      }
      break;
    case CopulaFamily::gaussian: {
      const double lower = -1.0 / (dim - 1);
      if (!(parameter > lower && parameter < 1.0)) {
        std::ostringstream msg;
        msg << "equicorrelation matrix with rho=" << parameter << " and d=" << dim
            << " is not positive definite (need " << lower << " < rho < 1)";
        throw DomainError(msg.str());
      }
      break;
    }
    case CopulaFamily::independence:
      break;
  }
}

Sample sample_independence(std::size_t n, int dim, RngStream& rng) {
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (int l = 0; l < dim; ++l) data(i, l) = rng.uniform_open();
  }
  return Sample(std::move(data));
}

Sample sample_clayton(std::size_t n, int dim, double theta, RngStream& rng) {
  CopulaModel{CopulaFamily::clayton, dim, theta}.validate();
  if (theta == 0.0) return sample_independence(n, dim, rng);
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), dim);
  const double shape = 1.0 / theta;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double frailty = rng.gamma(shape);
    for (int l = 0; l < dim; ++l) {
      const double e = rng.exponential();
      // log1p keeps precision when e / frailty is tiny
      data(i, l) = std::exp(-std::log1p(e / frailty) / theta);
    }
  }
  return Sample(std::move(data));
}

Sample sample_gaussian(std::size_t n, int dim, double rho, RngStream& rng) {
  CopulaModel{CopulaFamily::gaussian, dim, rho}.validate();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(dim, dim, rho);
  corr.diagonal().setOnes();
  const Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) {
    throw DomainError("equicorrelation matrix with rho=" + std::to_string(rho) +
                      " and d=" + std::to_string(dim) + " is not positive definite");
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  Eigen::MatrixXd white(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < white.rows(); ++i) {
    for (int l = 0; l < dim; ++l) white(i, l) = rng.normal();
  }
  return Sample(white * lower.transpose());
}

Sample sample_model(const CopulaModel& model, std::size_t n, RngStream& rng) {
  switch (model.family) {
    case CopulaFamily::clayton:
      return sample_clayton(n, model.dim, model.parameter, rng);
    case CopulaFamily::gaussian:
      return sample_gaussian(n, model.dim, model.parameter, rng);
    case CopulaFamily::independence:
      return sample_independence(n, model.dim, rng);
  }
  throw DomainError("unknown copula family");
}

double clayton_theta_from_tau(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw DomainError("Clayton Kendall tau must lie in [0,1), got " + std::to_string(tau));
  }
  return 2.0 * tau / (1.0 - tau);
}

double gaussian_rho_from_tau(double tau) {
  if (!(std::abs(tau) < 1.0)) {
    throw DomainError("Gaussian Kendall tau must lie in (-1,1), got " + std::to_string(tau));
  }
  return std::sin(std::numbers::pi * tau / 2.0);
}

namespace {

// Counts inversions of v while merge-sorting it.
std::uint64_t count_swaps(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = count_swaps(v, scratch, lo, mid) + count_swaps(v, scratch, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      swaps += mid - a;
      scratch[out++] = v[b++];
    } else {
      scratch[out++] = v[a++];
    }
  }
  while (a < mid) scratch[out++] = v[a++];
  while (b < hi) scratch[out++] = v[b++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Number of pairs tied within runs of equal values of a sorted sequence.
template <class Eq>
std::uint64_t tied_pairs(std::size_t n, Eq&& equal) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double sample_kendall_tau(const Sample& sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw DomainError("Kendall tau needs at least 2 observations");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sample(a, 0) != sample(b, 0)) return sample(a, 0) < sample(b, 0);
    return sample(a, 1) < sample(b, 1);
  });
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = sample(order[i], 0);
    y[i] = sample(order[i], 1);
  }
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t ties_x = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t ties_xy = tied_pairs(
      n, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });
  std::vector<double> scratch(n);
  const std::uint64_t discordant = count_swaps(y, scratch, 0, n);
  const std::uint64_t ties_y = tied_pairs(n, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });
  // Knight's identity: concordant - discordant over untied pairs.
  const double numerator = static_cast<double>(total) - static_cast<double>(ties_x) -
                           static_cast<double>(ties_y) + static_cast<double>(ties_xy) -
                           2.0 * static_cast<double>(discordant);
  return numerator / static_cast<double>(total);
}

}  // namespace copeq
