#include "copeq/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string_view>

#include "copeq/errors.hpp"

namespace copeq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

CsvData read_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  bool header = false;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> values;
    values.reserve(cells.size());
    std::optional<std::size_t> bad;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        if (!bad) bad = c;
        continue;
      }
      if (!std::isfinite(*v)) {
        throw InputError(source + ":" + std::to_string(line_no) + ": non-finite value in column " +
                         std::to_string(c + 1));
      }
      values.push_back(*v);
    }
    if (bad) {
      if (rows.empty() && !header) {
        header = true;
        width = cells.size();
        continue;
      }
      throw InputError(source + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                       std::string(cells[*bad]) + "' in column " + std::to_string(*bad + 1));
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " columns, found " + std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) {
    throw InputError(source + ": need at least 2 data rows, found " + std::to_string(rows.size()));
  }
  if (width < 2) {
    throw InputError(source + ": need at least 2 columns, found " + std::to_string(width));
  }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  Sample sample(std::move(data));
  const std::size_t ties = count_ties(sample);
  return CsvData{std::move(sample), header, ties};
}

CsvData read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, path);
}

std::size_t count_ties(const Sample& sample) {
  std::size_t ties = 0;
  std::vector<double> col(sample.size());
  for (int l = 0; l < sample.dim(); ++l) {
    for (std::size_t i = 0; i < sample.size(); ++i) col[i] = sample(i, l);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 1; i < col.size(); ++i) ties += col[i] == col[i - 1] ? 1 : 0;
  }
  return ties;
}

}  // namespace copeq
