#include "copeq/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "copeq/errors.hpp"

namespace copeq {

std::string_view to_string(ModeSelection m) {
  switch (m) {
    case ModeSelection::bernstein:
      return "bernstein";
    case ModeSelection::empirical:
      return "empirical";
    case ModeSelection::both:
      return "both";
  }
  return "?";
}

ModeSelection parse_mode(std::string_view text) {
  if (text == "bernstein") return ModeSelection::bernstein;
  if (text == "empirical") return ModeSelection::empirical;
  if (text == "both") return ModeSelection::both;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected bernstein, empirical or both)");
}

void TestConfig::validate() const {
  if (H < 1) throw ConfigError("H must be >= 1");
  if (grid_points < 2) throw ConfigError("grid points per axis must be >= 2");
  if (!multiplier && !subsample) throw ConfigError("no resampling method selected");
  if (orders && (orders->first < 1 || orders->second < 1)) {
    throw ConfigError("explicit Bernstein orders must be >= 1");
  }
  if (subsample_orders && (subsample_orders->first < 1 || subsample_orders->second < 1)) {
    throw ConfigError("explicit subsample Bernstein orders must be >= 1");
  }
}

std::vector<Smoothing> TestConfig::modes() const {
  switch (mode) {
    case ModeSelection::bernstein:
      return {Smoothing::bernstein};
    case ModeSelection::empirical:
      return {Smoothing::empirical};
    case ModeSelection::both:
      break;
  }
  return {Smoothing::bernstein, Smoothing::empirical};
}

std::vector<Method> TestConfig::methods() const {
  std::vector<Method> out;
  if (multiplier) out.push_back(Method::multiplier);
  if (subsample) out.push_back(Method::subsample);
  return out;
}

ResolvedOrders resolve_orders(std::size_t n1, std::size_t n2, const TestConfig& cfg) {
  ResolvedOrders r;
  if (cfg.orders) {
    r.m1 = cfg.orders->first;
    r.m2 = cfg.orders->second;
  } else {
    r.m1 = static_cast<int>(n1 / 5);
    r.m2 = static_cast<int>(n2 / 5);
  }
  const bool uses_bernstein = cfg.mode != ModeSelection::empirical;
  if (uses_bernstein && (r.m1 < 1 || r.m2 < 1)) {
    throw ConfigError("Bernstein order rule gives m=(" + std::to_string(r.m1) + "," +
                      std::to_string(r.m2) + ") for n=(" + std::to_string(n1) + "," +
                      std::to_string(n2) + "); pass explicit orders with --m M1,M2");
  }
  if (cfg.subsample_sizes) {
    r.b1 = cfg.subsample_sizes->first;
    r.b2 = cfg.subsample_sizes->second;
  } else {
    // floor(0.28 n) computed exactly as floor(28 n / 100)
    r.b1 = 28 * n1 / 100;
    r.b2 = 28 * n2 / 100;
  }
  if (cfg.subsample_orders) {
    r.m_sub1 = cfg.subsample_orders->first;
    r.m_sub2 = cfg.subsample_orders->second;
  } else {
    r.m_sub1 = static_cast<int>(r.b1);
    r.m_sub2 = static_cast<int>(r.b2);
  }
  if (cfg.subsample) {
    if (r.b1 < 2 || r.b2 < 2 || r.b1 >= n1 || r.b2 >= n2) {
      throw ConfigError("subsample sizes b=(" + std::to_string(r.b1) + "," + std::to_string(r.b2) +
                        ") must satisfy 2 <= b < n for n=(" + std::to_string(n1) + "," +
                        std::to_string(n2) + ")");
    }
  }
  return r;
}

ReplicateSummary summarize(std::span<const double> replicates) {
  ReplicateSummary s;
  s.count = replicates.size();
  if (replicates.empty()) return s;
  std::vector<double> sorted(replicates.begin(), replicates.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.min = sorted.front();
  s.max = sorted.back();
  s.q05 = quantile(0.05);
  s.median = quantile(0.5);
  s.q95 = quantile(0.95);
  return s;
}

const ReportEntry& TestReport::find(Statistic s, Smoothing mode, Method method) const {
  for (const auto& e : entries) {
    if (e.statistic == s && e.mode == mode && e.method == method) return e;
  }
  throw std::out_of_range("no report entry for " + std::string(to_string(s)) + "/" +
                          std::string(to_string(mode)) + "/" + std::string(to_string(method)));
}

namespace {

void append_entries(TestReport& report, const MethodResult& result, Smoothing mode, Method method,
                    std::size_t H) {
  for (Statistic s : {Statistic::R, Statistic::S, Statistic::T}) {
    ReportEntry e;
    e.statistic = s;
    e.mode = mode;
    e.method = method;
    e.observed = result.observed[s];
    e.p_value = result.p_values[s];
    e.H = H;
    e.replicates = summarize(result.replicates(s));
    report.entries.push_back(e);
  }
  for (const auto& w : result.warnings) {
    if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end()) {
      report.warnings.push_back(w);
    }
  }
}

TestReport run_pipelines(const Sample& x, const Sample& y, const TestConfig& cfg,
                         const RngStream& rng, Coupling coupling) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (x.dim() != y.dim()) {
    throw DomainError("sample dimensions differ: X has " + std::to_string(x.dim()) +
                      " columns, Y has " + std::to_string(y.dim()));
  }
  TestReport report;
  report.sizes = SampleSizes(x.size(), y.size());
  report.paired = coupling == Coupling::paired;
  report.config = cfg;
  report.orders = resolve_orders(x.size(), y.size(), cfg);
  const auto& o = report.orders;

  const EvaluationGrid grid(x.dim(), cfg.grid_points);
  // Randomness is drawn once and shared by every smoothing mode.
  const auto multiplier_rng = rng.split(0);
  const auto subsample_rng = rng.split(1);
  std::vector<MultiplierBlock> blocks;
  if (cfg.multiplier) {
    blocks = coupling == Coupling::paired ? draw_paired_multipliers(x.size(), cfg.H, multiplier_rng)
                                          : draw_centered_multipliers(x.size(), y.size(), cfg.H,
                                                                      multiplier_rng);
  }
  const SubsampleConfig sub_cfg{o.b1, o.b2, o.m_sub1, o.m_sub2, cfg.H};

  for (Smoothing mode : cfg.modes()) {
    const auto evC = make_evaluator(x, mode, o.m1);
    const auto evD = make_evaluator(y, mode, o.m2);
    const ProcessBasis c(evC, grid);
    const ProcessBasis d(evD, grid);
    if (cfg.multiplier) {
      auto result = multiplier_from_blocks(c, d, blocks);
      if (mode == Smoothing::bernstein &&
          (static_cast<std::size_t>(o.m1) >= x.size() || static_cast<std::size_t>(o.m2) >= y.size())) {
        result.warnings.emplace_back(
            "Bernstein order m >= n: the multiplier bootstrap is not justified for the empirical "
            "beta copula; consider subsampling");
      }
      append_entries(report, result, mode, Method::multiplier, cfg.H);
    }
    if (cfg.subsample) {
      const auto result = subsample_from_bases(x, y, c, d, sub_cfg, mode, coupling, subsample_rng);
      append_entries(report, result, mode, Method::subsample, cfg.H);
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

TestReport two_sample_test(const Sample& x, const Sample& y, const TestConfig& cfg,
                           const RngStream& rng) {
  return run_pipelines(x, y, cfg, rng, Coupling::independent);
}

TestReport two_sample_test(const Sample& x, const Sample& y, const TestConfig& cfg) {
  return two_sample_test(x, y, cfg, RngStream(cfg.seed));
}

TestReport paired_sample_test(const Sample& z, int dim, const TestConfig& cfg,
                              const RngStream& rng) {
  if (z.dim() % 2 != 0) {
    throw DomainError("paired sample needs an even number of columns, got " + std::to_string(z.dim()));
  }
  if (dim * 2 != z.dim()) {
    throw DomainError("paired sample has " + std::to_string(z.dim()) + " columns but dim=" +
                      std::to_string(dim) + " requires " + std::to_string(2 * dim));
  }
  return run_pipelines(z.columns(0, dim), z.columns(dim, dim), cfg, rng, Coupling::paired);
}

TestReport paired_sample_test(const Sample& z, int dim, const TestConfig& cfg) {
  return paired_sample_test(z, dim, cfg, RngStream(cfg.seed));
}

}  // namespace copeq
