#pragma once

#include <string>

namespace nfloc {

/// Shortest decimal string that reads back to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_number(double value);

/// Parses a double written by format_number (or any strtod-style literal).
/// Throws InvalidArgument on trailing garbage.
double parse_number(const std::string& text);

}  // namespace nfloc
