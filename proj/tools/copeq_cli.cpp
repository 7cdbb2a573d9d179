// copeq: two-sample copula equality tests and Monte Carlo level/power studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "copeq/csv.hpp"
#include "copeq/errors.hpp"
#include "copeq/format.hpp"
#include "copeq/parallel.hpp"
#include "copeq/runner.hpp"
#include "copeq/study.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

struct TestArgs {
  std::string x;
  std::string y;
  std::string paired;
  int dim = 0;
  std::string methods = "multiplier,subsample";
  std::string mode = "bernstein";
  std::string m = "auto";
  std::string b = "auto";
  std::string m_sub = "auto";
  std::size_t H = 200;
  int grid = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "kv";
  double level = 0.05;
  bool timing = false;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  bool fast = false;
  unsigned threads = 0;
  bool quiet = false;
};

template <class T>
std::optional<std::pair<T, T>> pair_or_auto(const std::string& flag, const std::string& text) {
  if (text == "auto") return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw copeq::ConfigError(flag + " expects auto or A,B");
  try {
    const auto a = static_cast<T>(std::stoll(text.substr(0, comma)));
    const auto b = static_cast<T>(std::stoll(text.substr(comma + 1)));
    return std::make_pair(a, b);
  } catch (const std::logic_error&) {
    throw copeq::ConfigError(flag + " expects auto or A,B, got '" + text + "'");
  }
}

copeq::TestConfig make_test_config(const TestArgs& a) {
  copeq::TestConfig cfg;
  cfg.mode = copeq::parse_mode(a.mode);
  cfg.multiplier = false;
  cfg.subsample = false;
  std::stringstream ss(a.methods);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "multiplier") {
      cfg.multiplier = true;
    } else if (item == "subsample") {
      cfg.subsample = true;
    } else {
      throw copeq::ConfigError("unknown method '" + item + "'");
    }
  }
  cfg.orders = pair_or_auto<int>("--m", a.m);
  cfg.subsample_sizes = pair_or_auto<std::size_t>("--b", a.b);
  cfg.subsample_orders = pair_or_auto<int>("--m-sub", a.m_sub);
  cfg.H = a.H;
  cfg.grid_points = a.grid;
  cfg.seed = a.seed;
  if (!(a.level > 0.0 && a.level < 1.0)) throw copeq::ConfigError("--level must lie in (0,1)");
  cfg.validate();
  return cfg;
}

void warn_ties(const copeq::CsvData& data, const std::string& path) {
  if (data.tied_values > 0) {
    std::cerr << "warning: " << path << " has " << data.tied_values
              << " tied values; ties receive their maximal rank\n";
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw copeq::InputError("cannot write '" + path + "'");
  out << text;
}

int run_test(const TestArgs& a, bool paired_verb) {
  const auto cfg = make_test_config(a);
  copeq::TestReport report;
  const std::string paired_path = paired_verb ? a.x : a.paired;
  if (!paired_path.empty()) {
    if (a.dim < 1) throw copeq::ConfigError("paired input needs --dim D");
    const auto z = copeq::read_csv_file(paired_path);
    warn_ties(z, paired_path);
    if (z.sample.dim() != 2 * a.dim) {
      throw copeq::InputError(paired_path + " has " + std::to_string(z.sample.dim()) +
                              " columns but --dim " + std::to_string(a.dim) + " needs " +
                              std::to_string(2 * a.dim));
    }
    report = copeq::paired_sample_test(z.sample, a.dim, cfg);
  } else {
    if (a.x.empty() || a.y.empty()) throw copeq::ConfigError("test needs --x and --y (or --paired)");
    const auto x = copeq::read_csv_file(a.x);
    const auto y = copeq::read_csv_file(a.y);
    warn_ties(x, a.x);
    warn_ties(y, a.y);
    if (x.sample.dim() != y.sample.dim()) {
      throw copeq::InputError("dimension mismatch: " + a.x + " has " + std::to_string(x.sample.dim()) +
                              " columns, " + a.y + " has " + std::to_string(y.sample.dim()));
    }
    report = copeq::two_sample_test(x.sample, y.sample, cfg);
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  write_output(a.out, a.format == "json" ? copeq::to_json(report, a.timing)
                                         : copeq::to_key_value(report, a.timing));
  for (const auto& e : report.entries) {
    std::cerr << copeq::to_string(e.statistic) << ' ' << copeq::to_string(e.mode) << ' '
              << copeq::to_string(e.method) << ": p=" << copeq::format_double(e.p_value)
              << (e.p_value <= a.level ? "  reject" : "  retain") << " at level "
              << copeq::format_double(a.level) << '\n';
  }
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  auto cfg = copeq::load_study_config(a.config);
  if (a.fast) copeq::apply_fast_profile(cfg);
  if (!a.out.empty()) cfg.output = a.out;
  const unsigned threads = copeq::resolve_threads(a.threads);
  copeq::StudyProgress progress;
  if (!a.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 10 == 0) {
        std::cerr << "\r" << done << "/" << total << " repetitions" << (done == total ? "\n" : "")
                  << std::flush;
      }
    };
  }
  const auto result = copeq::run_study(cfg, threads, progress);
  const auto table = copeq::emit_text_table(result.rows);
  std::cout << table;
  if (!cfg.output.empty()) {
    std::filesystem::create_directories(cfg.output);
    const std::filesystem::path dir(cfg.output);
    write_output((dir / "study.csv").string(), copeq::emit_csv(result.rows));
    write_output((dir / "study.txt").string(), table);
    write_output((dir / "manifest.json").string(), copeq::manifest_json(cfg, result));
  }
  return 0;
}

void add_test_options(CLI::App* cmd, TestArgs& a) {
  cmd->add_option("--methods", a.methods, "multiplier,subsample");
  cmd->add_option("--mode", a.mode, "bernstein|empirical|both");
  cmd->add_option("--m", a.m, "Bernstein orders: auto or M1,M2");
  cmd->add_option("--b", a.b, "subsample sizes: auto or B1,B2");
  cmd->add_option("--m-sub", a.m_sub, "subsample Bernstein orders: auto or M1,M2");
  cmd->add_option("--H", a.H, "replicate count");
  cmd->add_option("--grid", a.grid, "grid points per axis");
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--out", a.out, "report path (default stdout)");
  cmd->add_option("--format", a.format, "kv|json")->check(CLI::IsMember({"kv", "json"}));
  cmd->add_option("--level", a.level, "level used for the reject/retain summary");
  cmd->add_flag("--timing", a.timing, "include wall time in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copeq: tests for equality of copulas with empirical Bernstein copulas"};
  app.require_subcommand(1);

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "two-sample test on CSV data");
  test->add_option("--x", test_args.x, "CSV file for the first sample");
  test->add_option("--y", test_args.y, "CSV file for the second sample");
  test->add_option("--paired", test_args.paired, "CSV with 2D columns (X then Y)");
  test->add_option("--dim", test_args.dim, "dimension D of each half for paired input");
  add_test_options(test, test_args);

  TestArgs paired_args;
  auto* paired = app.add_subcommand("paired", "paired-sample test on a 2D-column CSV");
  paired->add_option("--z", paired_args.x, "CSV with 2D columns (X then Y)")->required();
  paired->add_option("--dim", paired_args.dim, "dimension D of each half")->required();
  add_test_options(paired, paired_args);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo level/power study");
  simulate->add_option("config", sim_args.config, "study configuration file")->required();
  simulate->add_option("--out", sim_args.out, "output directory (overrides config)");
  simulate->add_flag("--fast", sim_args.fast, "100 repetitions, H=100");
  simulate->add_option("--threads", sim_args.threads, "worker threads (COPEQ_THREADS overrides)");
  simulate->add_flag("--quiet", sim_args.quiet, "no progress output");

  auto* ver = app.add_subcommand("version", "print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ver) {
      std::cout << "copeq " << copeq::version() << '\n';
      return 0;
    }
    if (*test) return run_test(test_args, false);
    if (*paired) return run_test(paired_args, true);
    if (*simulate) return run_simulate(sim_args);
  } catch (const copeq::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const copeq::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const copeq::DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
