#include "nfloc/csv.hpp"

#include "nfloc/types.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace nfloc {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(Errc::InvalidArgument, "number formatting failed");
  return std::string(buf, end);
}

double parse_number(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || end != last || first == last) {
    throw Error(Errc::InvalidArgument, "not a number: '" + text + "'");
  }
  return value;
}

}  // namespace nfloc
