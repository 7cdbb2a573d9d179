#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "copeq/format.hpp"
#include "copeq/runner.hpp"

namespace copeq {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format_percent(double fraction) {
  std::array<char, 32> buf{};
  // Round half away from zero on the exact tenth-of-a-percent grid.
  const double tenths = std::round(fraction * 1000.0);
  std::snprintf(buf.data(), buf.size(), "%.1f", tenths / 10.0);
  return buf.data();
}

namespace {

std::string entry_prefix(const ReportEntry& e) {
  return std::string(to_string(e.mode)) + "." + std::string(to_string(e.method)) + "." +
         std::string(to_string(e.statistic));
}

}  // namespace

std::string to_key_value(const TestReport& report, bool timing) {
  std::ostringstream out;
  const auto& o = report.orders;
  out << "n1=" << report.sizes.n1 << '\n'
      << "n2=" << report.sizes.n2 << '\n'
      << "lambda=" << format_double(report.sizes.lambda()) << '\n'
      << "paired=" << (report.paired ? "true" : "false") << '\n'
      << "seed=" << report.config.seed << '\n'
      << "mode=" << to_string(report.config.mode) << '\n'
      << "H=" << report.config.H << '\n'
      << "grid=" << report.config.grid_points << '\n'
      << "m1=" << o.m1 << '\n'
      << "m2=" << o.m2 << '\n'
      << "b1=" << o.b1 << '\n'
      << "b2=" << o.b2 << '\n'
      << "m_sub1=" << o.m_sub1 << '\n'
      << "m_sub2=" << o.m_sub2 << '\n';
  for (const auto& e : report.entries) {
    const auto key = entry_prefix(e);
    out << key << ".observed=" << format_double(e.observed) << '\n'
        << key << ".p_value=" << format_double(e.p_value) << '\n'
        << key << ".replicates=" << e.replicates.count << ',' << format_double(e.replicates.min)
        << ',' << format_double(e.replicates.q05) << ',' << format_double(e.replicates.median)
        << ',' << format_double(e.replicates.q95) << ',' << format_double(e.replicates.max) << '\n';
  }
  for (std::size_t i = 0; i < report.warnings.size(); ++i) {
    out << "warning." << i << '=' << report.warnings[i] << '\n';
  }
  if (timing) out << "wall_seconds=" << format_double(report.wall_seconds) << '\n';
  return out.str();
}

std::string to_json(const TestReport& report, bool timing) {
  using nlohmann::ordered_json;
  const auto& o = report.orders;
  ordered_json doc;
  doc["n1"] = report.sizes.n1;
  doc["n2"] = report.sizes.n2;
  doc["paired"] = report.paired;
  doc["seed"] = report.config.seed;
  doc["mode"] = to_string(report.config.mode);
  doc["H"] = report.config.H;
  doc["grid"] = report.config.grid_points;
  doc["m1"] = o.m1;
  doc["m2"] = o.m2;
  doc["b1"] = o.b1;
  doc["b2"] = o.b2;
  doc["m_sub1"] = o.m_sub1;
  doc["m_sub2"] = o.m_sub2;
  auto results = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json item;
    item["statistic"] = to_string(e.statistic);
    item["mode"] = to_string(e.mode);
    item["method"] = to_string(e.method);
    item["observed"] = e.observed;
    item["p_value"] = e.p_value;
    item["H"] = e.H;
    item["replicates"] = {{"count", e.replicates.count}, {"min", e.replicates.min},
                          {"q05", e.replicates.q05},     {"median", e.replicates.median},
                          {"q95", e.replicates.q95},     {"max", e.replicates.max}};
    results.push_back(std::move(item));
  }
  doc["results"] = std::move(results);
  doc["warnings"] = report.warnings;
  if (timing) doc["wall_seconds"] = report.wall_seconds;
  return doc.dump(2) + "\n";
}

}  // namespace copeq
