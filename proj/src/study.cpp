#include "copeq/study.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "copeq/errors.hpp"
#include "copeq/format.hpp"
#include "copeq/parallel.hpp"

#ifndef COPEQ_VERSION
#define COPEQ_VERSION "0.1.0"
#endif

namespace copeq {

std::string_view version() { return COPEQ_VERSION; }

std::string_view to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::tau:
      return "tau";
    case ParamKind::theta:
      return "theta";
    case ParamKind::rho:
      return "rho";
  }
  return "?";
}

ParamKind parse_param_kind(std::string_view text) {
  if (text == "tau") return ParamKind::tau;
  if (text == "theta") return ParamKind::theta;
  if (text == "rho") return ParamKind::rho;
  throw ConfigError("unknown param_kind '" + std::string(text) + "' (expected tau, theta or rho)");
}

CopulaModel StudyConfig::model_for(double param) const {
  CopulaModel model{family, dim, 0.0};
  try {
    switch (family) {
      case CopulaFamily::clayton:
        if (param_kind == ParamKind::rho) throw ConfigError("param_kind rho is not valid for clayton");
        model.parameter = param_kind == ParamKind::tau ? clayton_theta_from_tau(param) : param;
        break;
      case CopulaFamily::gaussian:
        // theta labels the common correlation of the equicorrelated family
        model.parameter = param_kind == ParamKind::tau ? gaussian_rho_from_tau(param) : param;
        break;
      case CopulaFamily::independence:
        break;
    }
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return model;
}

void StudyConfig::validate() const {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0,1)");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (varying_params.empty()) throw ConfigError("varying_params must not be empty");
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (n1 < 2 || n2 < 2) throw ConfigError("sample sizes must be >= 2");
  test.validate();
  model_for(baseline_param);
  for (double p : varying_params) model_for(p);
  resolve_orders(n1, n2, test);
}

namespace {

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim_copy(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <class T>
std::optional<std::pair<T, T>> parse_pair_or_auto(const std::string& key, const std::string& text) {
  if (text == "auto") return std::nullopt;
  const auto parts = split_list(text);
  if (parts.size() != 2) throw ConfigError("key '" + key + "' expects auto or two values A,B");
  return std::make_pair(parse_number<T>(key, parts[0]), parse_number<T>(key, parts[1]));
}

const std::set<std::string> kStudyKeys = {"family",         "dim",        "n1",          "n2",
                                          "baseline_param", "varying_params", "param_kind",
                                          "repetitions",    "level",      "output",      "seed"};
const std::set<std::string> kTestKeys = {"mode", "methods", "m", "H", "grid", "b", "m_sub", "seed"};

void apply_key(StudyConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "family") {
    cfg.family = parse_family(value);
  } else if (key == "dim") {
    cfg.dim = parse_number<int>(key, value);
  } else if (key == "n1") {
    cfg.n1 = parse_number<std::size_t>(key, value);
  } else if (key == "n2") {
    cfg.n2 = parse_number<std::size_t>(key, value);
  } else if (key == "baseline_param") {
    cfg.baseline_param = parse_number<double>(key, value);
  } else if (key == "varying_params") {
    cfg.varying_params.clear();
    for (const auto& item : split_list(value)) cfg.varying_params.push_back(parse_number<double>(key, item));
  } else if (key == "param_kind") {
    cfg.param_kind = parse_param_kind(value);
  } else if (key == "repetitions") {
    cfg.repetitions = parse_number<std::size_t>(key, value);
  } else if (key == "level") {
    cfg.level = parse_number<double>(key, value);
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "seed") {
    cfg.test.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "mode") {
    cfg.test.mode = parse_mode(value);
  } else if (key == "methods") {
    cfg.test.multiplier = false;
    cfg.test.subsample = false;
    for (const auto& m : split_list(value)) {
      if (m == "multiplier") {
        cfg.test.multiplier = true;
      } else if (m == "subsample") {
        cfg.test.subsample = true;
      } else {
        throw ConfigError("unknown method '" + m + "'");
      }
    }
  } else if (key == "m") {
    cfg.test.orders = parse_pair_or_auto<int>(key, value);
  } else if (key == "H") {
    cfg.test.H = parse_number<std::size_t>(key, value);
  } else if (key == "grid") {
    cfg.test.grid_points = parse_number<int>(key, value);
  } else if (key == "b") {
    cfg.test.subsample_sizes = parse_pair_or_auto<std::size_t>(key, value);
  } else if (key == "m_sub") {
    cfg.test.subsample_orders = parse_pair_or_auto<int>(key, value);
  }
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
  StudyConfig cfg;
  cfg.test.mode = ModeSelection::both;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim_copy(line);
    if (text.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim_copy(std::string_view(text).substr(1, text.size() - 2));
      if (section != "study" && section != "test") {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const auto key = trim_copy(std::string_view(text).substr(0, eq));
    const auto value = trim_copy(std::string_view(text).substr(eq + 1));
    const bool known = section == "study" ? kStudyKeys.count(key) > 0
                       : section == "test" ? kTestKeys.count(key) > 0
                                           : kStudyKeys.count(key) + kTestKeys.count(key) > 0;
    if (!known) {
      throw ConfigError(where + "unknown key '" + key + "'" +
                        (section.empty() ? std::string() : " in section [" + section + "]"));
    }
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      apply_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open study config '" + path + "'");
  return parse_study_config(in);
}

void apply_fast_profile(StudyConfig& cfg) {
  cfg.repetitions = 100;
  cfg.test.H = 100;
}

TestReport run_repetition(const StudyConfig& cfg, std::size_t row, std::size_t repetition) {
  const RngStream stream = RngStream(cfg.test.seed).split(row).split(repetition);
  auto x_rng = stream.split(0);
  auto y_rng = stream.split(1);
  const Sample x = sample_model(cfg.model_for(cfg.baseline_param), cfg.n1, x_rng);
  const Sample y = sample_model(cfg.model_for(cfg.varying_params.at(row)), cfg.n2, y_rng);
  return two_sample_test(x, y, cfg.test, stream.split(2));
}

StudyResult run_study(const StudyConfig& cfg, unsigned threads, const StudyProgress& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t rows = cfg.varying_params.size();
  const std::size_t jobs = rows * cfg.repetitions;

  struct Outcome {
    std::vector<ReportEntry> entries;
    double seconds = 0.0;
  };
  std::vector<Outcome> outcomes(jobs);
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> tests{0};
  std::mutex progress_mutex;
  parallel_for(jobs, threads, [&](std::size_t job) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_repetition(cfg, job / cfg.repetitions, job % cfg.repetitions);
    outcomes[job].entries = report.entries;
    outcomes[job].seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    tests += report.entries.size() / 3;
    const std::size_t finished = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(finished, jobs);
    }
  });

  StudyResult result;
  result.threads = threads;
  result.tests_executed = tests.load();
  for (std::size_t row = 0; row < rows; ++row) {
    const auto& first = outcomes[row * cfg.repetitions].entries;
    double seconds = 0.0;
    for (std::size_t r = 0; r < cfg.repetitions; ++r) seconds += outcomes[row * cfg.repetitions + r].seconds;
    for (std::size_t v = 0; v < first.size(); ++v) {
      StudyRow out;
      out.family = cfg.family;
      out.dim = cfg.dim;
      out.n1 = cfg.n1;
      out.n2 = cfg.n2;
      out.param = cfg.varying_params[row];
      out.mode = first[v].mode;
      out.method = first[v].method;
      out.statistic = first[v].statistic;
      out.reps = cfg.repetitions;
      for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        if (outcomes[row * cfg.repetitions + r].entries[v].p_value <= cfg.level) ++out.rejections;
      }
      out.rejection_rate = static_cast<double>(out.rejections) / static_cast<double>(out.reps);
      out.mean_seconds = seconds / static_cast<double>(cfg.repetitions);
      result.rows.push_back(out);
    }
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string emit_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "family,dim,n1,n2,param,mode,method,statistic,rejection_rate,reps\n";
  for (const auto& r : rows) {
    out << to_string(r.family) << ',' << r.dim << ',' << r.n1 << ',' << r.n2 << ','
        << format_double(r.param) << ',' << to_string(r.mode) << ',' << to_string(r.method) << ','
        << to_string(r.statistic) << ',' << format_double(r.rejection_rate) << ',' << r.reps << '\n';
  }
  return out.str();
}

std::vector<StudyRow> parse_study_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<StudyRow> rows;
  if (!std::getline(in, line) || line != "family,dim,n1,n2,param,mode,method,statistic,rejection_rate,reps") {
    throw InputError("study CSV has an unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != 10) {
      throw InputError("study CSV line " + std::to_string(line_no) + ": expected 10 fields");
    }
    StudyRow r;
    try {
      r.family = parse_family(cells[0]);
      r.dim = parse_number<int>("dim", cells[1]);
      r.n1 = parse_number<std::size_t>("n1", cells[2]);
      r.n2 = parse_number<std::size_t>("n2", cells[3]);
      r.param = parse_number<double>("param", cells[4]);
      if (cells[5] == "bernstein") {
        r.mode = Smoothing::bernstein;
      } else if (cells[5] == "empirical") {
        r.mode = Smoothing::empirical;
      } else {
        throw ConfigError("bad mode");
      }
      if (cells[6] == "multiplier") {
        r.method = Method::multiplier;
      } else if (cells[6] == "subsample") {
        r.method = Method::subsample;
      } else {
        throw ConfigError("bad method");
      }
      if (cells[7] == "R") {
        r.statistic = Statistic::R;
      } else if (cells[7] == "S") {
        r.statistic = Statistic::S;
      } else if (cells[7] == "T") {
        r.statistic = Statistic::T;
      } else {
        throw ConfigError("bad statistic");
      }
      r.rejection_rate = parse_number<double>("rejection_rate", cells[8]);
      r.reps = parse_number<std::size_t>("reps", cells[9]);
    } catch (const ConfigError& e) {
      throw InputError("study CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    r.rejections = static_cast<std::size_t>(std::llround(r.rejection_rate * static_cast<double>(r.reps)));
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string variant_label(const StudyRow& r) {
  return std::string(to_string(r.statistic)) + (r.mode == Smoothing::bernstein ? ".bern" : ".emp") +
         (r.method == Method::multiplier ? ".mul" : ".sub");
}

// Statistic-major, then empirical multiplier, Bernstein multiplier, Bernstein
// subsample, empirical subsample.
int variant_rank(const StudyRow& r) {
  int within = 0;
  if (r.method == Method::multiplier) {
    within = r.mode == Smoothing::empirical ? 0 : 1;
  } else {
    within = r.mode == Smoothing::bernstein ? 2 : 3;
  }
  return static_cast<int>(r.statistic) * 4 + within;
}

}  // namespace

std::string emit_text_table(const std::vector<StudyRow>& rows) {
  if (rows.empty()) return {};
  std::map<int, std::string> columns;
  std::vector<double> params;
  for (const auto& r : rows) {
    columns.emplace(variant_rank(r), variant_label(r));
    if (std::find(params.begin(), params.end(), r.param) == params.end()) params.push_back(r.param);
  }
  std::map<std::pair<double, int>, double> cell;
  for (const auto& r : rows) cell[{r.param, variant_rank(r)}] = r.rejection_rate;

  const auto& head = rows.front();
  std::ostringstream out;
  out << to_string(head.family) << " d=" << head.dim << " (n1, n2)=(" << head.n1 << ", " << head.n2
      << ")  reps=" << head.reps << "  rejection rate (%)\n";
  constexpr int kParamWidth = 8;
  constexpr int kCellWidth = 11;
  out << std::left << std::setw(kParamWidth) << "param" << std::right;
  for (const auto& [rank, label] : columns) out << std::setw(kCellWidth) << label;
  out << '\n';
  for (double p : params) {
    out << std::left << std::setw(kParamWidth) << format_double(p) << std::right;
    for (const auto& [rank, label] : columns) {
      const auto it = cell.find({p, rank});
      out << std::setw(kCellWidth) << (it == cell.end() ? std::string("-") : format_percent(it->second));
    }
    out << '\n';
  }
  return out.str();
}

std::string manifest_json(const StudyConfig& cfg, const StudyResult& result) {
  nlohmann::ordered_json doc;
  doc["version"] = version();
  doc["seed"] = cfg.test.seed;
  doc["threads"] = result.threads;
  doc["wall_seconds"] = result.wall_seconds;
  doc["tests_executed"] = result.tests_executed;
  const std::size_t expected = cfg.repetitions * cfg.varying_params.size() *
                               cfg.test.methods().size() * cfg.test.modes().size();
  doc["tests_expected"] = expected;
  const auto o = resolve_orders(cfg.n1, cfg.n2, cfg.test);
  doc["config"] = {{"family", to_string(cfg.family)},
                   {"dim", cfg.dim},
                   {"n1", cfg.n1},
                   {"n2", cfg.n2},
                   {"baseline_param", cfg.baseline_param},
                   {"varying_params", cfg.varying_params},
                   {"param_kind", to_string(cfg.param_kind)},
                   {"repetitions", cfg.repetitions},
                   {"level", cfg.level},
                   {"mode", to_string(cfg.test.mode)},
                   {"multiplier", cfg.test.multiplier},
                   {"subsample", cfg.test.subsample},
                   {"H", cfg.test.H},
                   {"grid", cfg.test.grid_points},
                   {"m1", o.m1},
                   {"m2", o.m2},
                   {"b1", o.b1},
                   {"b2", o.b2},
                   {"m_sub1", o.m_sub1},
                   {"m_sub2", o.m_sub2}};
  auto timing = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    if (r.statistic != Statistic::R) continue;
    timing.push_back({{"param", r.param},
                      {"mode", to_string(r.mode)},
                      {"method", to_string(r.method)},
                      {"mean_seconds_per_repetition", r.mean_seconds}});
  }
  doc["timing"] = std::move(timing);
  return doc.dump(2) + "\n";
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("Spearman needs two equal series of length >= 2");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    std::size_t start = 0;
    while (start < v.size()) {
      std::size_t stop = start + 1;
      while (stop < v.size() && v[order[stop]] == v[order[start]]) ++stop;
      const double avg = 0.5 * static_cast<double>(start + stop - 1) + 1.0;
      for (std::size_t k = start; k < stop; ++k) r[order[k]] = avg;
      start = stop;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace copeq
