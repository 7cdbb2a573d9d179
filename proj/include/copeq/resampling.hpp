#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "copeq/bernstein.hpp"
#include "copeq/copula.hpp"
#include "copeq/rng.hpp"
#include "copeq/statistics.hpp"

namespace copeq {

enum class Smoothing { bernstein, empirical };
enum class Method { multiplier, subsample };
/// How resampling randomness is shared between the two samples.
enum class Coupling { independent, paired };

std::string_view to_string(Smoothing s);
std::string_view to_string(Method m);

/// Replicate statistics for one (smoothing, method) pair, with p-values.
struct MethodResult {
  StatisticTriple observed;
  std::vector<double> replicates_R;
  std::vector<double> replicates_S;
  std::vector<double> replicates_T;
  StatisticTriple p_values;
  std::vector<std::string> warnings;

  std::span<const double> replicates(Statistic s) const;
};

/// Right-tail Monte Carlo p-value: fraction of replicates >= observed.
double p_value(double observed, std::span<const double> replicates);

/// Everything about one estimator on one grid that the replicate processes
/// reuse: observation factors at the grid points and at the margin points
/// u^l = (1, .., u_l, .., 1), partial derivatives, surface values and
/// Stieltjes cell masses.
class ProcessBasis {
 public:
  ProcessBasis(const CopulaEvaluator& ev, const EvaluationGrid& grid);

  std::size_t size() const noexcept { return n_; }
  const EvaluationGrid& grid() const noexcept { return *grid_; }
  const std::vector<double>& surface() const noexcept { return surface_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  const Eigen::MatrixXd& derivatives() const noexcept { return derivatives_; }

  /// Replicate processes for the centred multipliers in the columns of `xi`
  /// (n x H); returns G x H.
  Eigen::MatrixXd replicate_processes(const Eigen::MatrixXd& xi) const;
  /// Multiplier-weighted processes without margin correction (G x H).
  Eigen::MatrixXd g_hat(const Eigen::MatrixXd& xi) const;

 private:
  const EvaluationGrid* grid_;
  std::size_t n_;
  Eigen::MatrixXd factors_;               // n x G
  std::vector<Eigen::MatrixXd> margins_;  // per axis, n x g
  Eigen::MatrixXd derivatives_;           // G x d
  std::vector<double> surface_;
  std::vector<double> masses_;
};

// ----- multiplier bootstrap -------------------------------------------------

/// Exp(1) multipliers centred by their own block mean.
struct MultiplierBlock {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
};

/// Block h uses substream rng.split(h): n1 + n2 Exp(1) draws, the first n1
/// centred by their mean and the last n2 by theirs.
std::vector<MultiplierBlock> draw_centered_multipliers(std::size_t n1, std::size_t n2,
                                                       std::size_t H, const RngStream& rng);
/// One multiplier per paired row, shared by both halves.
std::vector<MultiplierBlock> draw_paired_multipliers(std::size_t n, std::size_t H,
                                                     const RngStream& rng);

std::vector<double> g_hat_process(const CopulaEvaluator& ev, std::span<const double> xi_centered,
                                  const std::vector<std::vector<double>>& points);

std::vector<double> replicate_process_C(const CopulaEvaluator& ev,
                                        std::span<const double> xi_centered,
                                        const EvaluationGrid& grid);

/// F = sqrt(1 - lambda) repC - sqrt(lambda) repD integrated against the grid
/// (R), the first estimator's cell masses (S), and its grid maximum (T).
StatisticTriple replicate_statistics(std::span<const double> repC, std::span<const double> repD,
                                     const SampleSizes& sizes, const CopulaEvaluator& evC,
                                     const EvaluationGrid& grid);
StatisticTriple replicate_statistics(std::span<const double> repC, std::span<const double> repD,
                                     double lambda, std::span<const double> masses,
                                     const EvaluationGrid& grid);

/// Observed statistics from two bases sharing one grid.
StatisticTriple observed_statistics(const ProcessBasis& c, const ProcessBasis& d,
                                    const SampleSizes& sizes);

MethodResult multiplier_from_blocks(const ProcessBasis& c, const ProcessBasis& d,
                                    std::span<const MultiplierBlock> blocks);

/// `orders` is ignored in empirical mode.
MethodResult multiplier_test(const Sample& x, const Sample& y, Smoothing mode,
                             std::pair<int, int> orders, std::size_t H,
                             const EvaluationGrid& grid, const RngStream& rng);

// ----- subsampling ----------------------------------------------------------

struct SubsampleConfig {
  std::size_t b1 = 0;
  std::size_t b2 = 0;
  int m_sub1 = 1;
  int m_sub2 = 1;
  std::size_t H = 200;

  void validate(std::size_t n1, std::size_t n2) const;
};

/// b distinct indices from 0..n-1, uniformly without replacement, sorted.
std::vector<std::size_t> draw_subsample_indices(std::size_t n, std::size_t b, RngStream& rng);

/// sqrt(b / (1 - b/n)) (C_b - C_n) on the grid, with the subsample re-ranked.
/// `m_sub` empty selects the unsmoothed empirical copula.
std::vector<double> subsample_replicate_process(std::span<const double> full_surface,
                                                const Sample& sub_rows,
                                                std::optional<BernsteinOrder> m_sub,
                                                std::size_t n, const EvaluationGrid& grid);
std::vector<double> subsample_replicate_process(const CopulaEvaluator& full_ev,
                                                const Sample& sub_rows,
                                                std::optional<BernsteinOrder> m_sub,
                                                std::size_t n, std::size_t b,
                                                const EvaluationGrid& grid);

MethodResult subsample_from_bases(const Sample& x, const Sample& y, const ProcessBasis& c,
                                  const ProcessBasis& d, const SubsampleConfig& cfg,
                                  Smoothing mode, Coupling coupling, const RngStream& rng);

MethodResult subsample_test(const Sample& x, const Sample& y, const SubsampleConfig& cfg,
                            Smoothing mode, std::pair<int, int> orders,
                            const EvaluationGrid& grid, const RngStream& rng,
                            Coupling coupling = Coupling::independent);

/// Evaluator of the requested smoothing for a raw sample.
CopulaEvaluator make_evaluator(const Sample& sample, Smoothing mode, int order);

}  // namespace copeq
