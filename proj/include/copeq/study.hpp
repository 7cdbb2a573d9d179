#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "copeq/resampling.hpp"
#include "copeq/runner.hpp"
#include "copeq/samplers.hpp"

namespace copeq {

std::string_view version();

enum class ParamKind { tau, theta, rho };

std::string_view to_string(ParamKind kind);
ParamKind parse_param_kind(std::string_view text);

/// Level/power experiment: X drawn at `baseline_param`, Y at each entry of
/// `varying_params`, both redrawn for every repetition.
struct StudyConfig {
  CopulaFamily family = CopulaFamily::clayton;
  int dim = 2;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  double baseline_param = 0.2;
  std::vector<double> varying_params;
  ParamKind param_kind = ParamKind::tau;
  std::size_t repetitions = 500;
  double level = 0.05;
  TestConfig test;
  std::string output;

  void validate() const;
  /// Copula model for a parameter given in `param_kind` units.
  CopulaModel model_for(double param) const;
};

/// Parses `key = value` lines, optionally grouped under [study] and [test]
/// headers. '#' starts a comment. Unknown keys raise ConfigError.
StudyConfig parse_study_config(std::istream& in);
StudyConfig load_study_config(const std::string& path);

/// Lower repetitions and H to 100 for quick runs.
void apply_fast_profile(StudyConfig& cfg);

struct StudyRow {
  CopulaFamily family = CopulaFamily::clayton;
  int dim = 2;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double param = 0.0;
  Smoothing mode = Smoothing::bernstein;
  Method method = Method::multiplier;
  Statistic statistic = Statistic::R;
  double rejection_rate = 0.0;
  std::size_t reps = 0;
  std::size_t rejections = 0;
  double mean_seconds = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::size_t tests_executed = 0;
  double wall_seconds = 0.0;
  unsigned threads = 1;
};

using StudyProgress = std::function<void(std::size_t done, std::size_t total)>;

/// Repetition r of parameter row k uses substream seed.split(k).split(r):
/// purpose 0 draws X, 1 draws Y, 2 drives the resampling.
StudyResult run_study(const StudyConfig& cfg, unsigned threads, const StudyProgress& progress = {});

/// One repetition of one parameter row, on its keyed substream.
TestReport run_repetition(const StudyConfig& cfg, std::size_t row, std::size_t repetition);

std::string emit_csv(const std::vector<StudyRow>& rows);
std::vector<StudyRow> parse_study_csv(const std::string& text);
/// Rows = parameters, columns = test variants, percentages with one decimal.
std::string emit_text_table(const std::vector<StudyRow>& rows);
std::string manifest_json(const StudyConfig& cfg, const StudyResult& result);

/// Spearman rank correlation (average ranks for ties).
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace copeq
