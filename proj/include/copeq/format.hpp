#pragma once

#include <string>

namespace copeq {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Percentage with one decimal ("61.2").
std::string format_percent(double fraction);

}  // namespace copeq
