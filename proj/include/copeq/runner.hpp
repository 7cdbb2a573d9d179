#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copeq/copula.hpp"
#include "copeq/resampling.hpp"
#include "copeq/rng.hpp"
#include "copeq/statistics.hpp"

namespace copeq {

enum class ModeSelection { bernstein, empirical, both };

std::string_view to_string(ModeSelection m);
ModeSelection parse_mode(std::string_view text);

struct TestConfig {
  ModeSelection mode = ModeSelection::bernstein;
  /// Explicit (m1, m2); empty means m_r = floor(n_r / 5).
  std::optional<std::pair<int, int>> orders;
  bool multiplier = true;
  bool subsample = true;
  std::size_t H = 200;
  int grid_points = 20;
  /// Explicit (b1, b2); empty means b_r = floor(0.28 n_r).
  std::optional<std::pair<std::size_t, std::size_t>> subsample_sizes;
  /// Explicit subsample orders; empty means m_sub_r = b_r.
  std::optional<std::pair<int, int>> subsample_orders;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<Smoothing> modes() const;
  std::vector<Method> methods() const;
};

struct ResolvedOrders {
  int m1 = 0;
  int m2 = 0;
  std::size_t b1 = 0;
  std::size_t b2 = 0;
  int m_sub1 = 0;
  int m_sub2 = 0;

  friend bool operator==(const ResolvedOrders&, const ResolvedOrders&) = default;
};

/// m_r = floor(n_r / 5), b_r = floor(0.28 n_r), m_sub_r = b_r unless given.
ResolvedOrders resolve_orders(std::size_t n1, std::size_t n2, const TestConfig& cfg);

struct ReplicateSummary {
  std::size_t count = 0;
  double min = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

ReplicateSummary summarize(std::span<const double> replicates);

struct ReportEntry {
  Statistic statistic = Statistic::R;
  Smoothing mode = Smoothing::bernstein;
  Method method = Method::multiplier;
  double observed = 0.0;
  double p_value = 1.0;
  std::size_t H = 0;
  ReplicateSummary replicates;
};

struct TestReport {
  SampleSizes sizes{2, 2};
  bool paired = false;
  TestConfig config;
  ResolvedOrders orders;
  std::vector<ReportEntry> entries;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  /// Throws std::out_of_range when the combination was not run.
  const ReportEntry& find(Statistic s, Smoothing mode, Method method) const;
};

/// Runs every configured (mode, method) pipeline. All modes consume the same
/// multiplier blocks and subsample index sets, so columns are comparable.
TestReport two_sample_test(const Sample& x, const Sample& y, const TestConfig& cfg);
TestReport two_sample_test(const Sample& x, const Sample& y, const TestConfig& cfg,
                           const RngStream& rng);

/// Z holds X in its first `dim` columns and Y in the last `dim`. Resampling
/// shares multipliers and subsample indices between the two halves of a row.
TestReport paired_sample_test(const Sample& z, int dim, const TestConfig& cfg);
TestReport paired_sample_test(const Sample& z, int dim, const TestConfig& cfg,
                              const RngStream& rng);

/// Flat `key=value` lines; wall time only when `timing` is set.
std::string to_key_value(const TestReport& report, bool timing = false);
/// JSON document with fixed field names; wall time only when `timing` is set.
std::string to_json(const TestReport& report, bool timing = false);

}  // namespace copeq
