#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "copeq/copula.hpp"

namespace copeq {

struct CsvData {
  Sample sample;
  bool had_header = false;
  /// Observations sharing a value with an earlier row of the same column.
  std::size_t tied_values = 0;
};

/// Comma-separated numeric rows with an optional single header line (a first
/// line containing a non-numeric cell). Throws InputError naming the line.
CsvData read_csv(std::istream& in, const std::string& source = "<input>");
CsvData read_csv_file(const std::string& path);

/// Number of values per column that duplicate another value in that column.
std::size_t count_ties(const Sample& sample);

}  // namespace copeq
