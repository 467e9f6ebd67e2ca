#include "amv/core/parse.hpp"

#include <cerrno>
#include <cstdlib>
#include <limits>

#include "amv/core/common.hpp"

namespace amv::detail {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string text = trim(s);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text.empty()) throw ConfigError(std::string(what) + ": expected a number, got an empty string");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw ConfigError(std::string(what) + ": cannot parse '" + text + "' as a number");
  }
  return v;
}

long parse_long(std::string_view s, std::string_view what) {
  const std::string text = trim(s);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw ConfigError(std::string(what) + ": cannot parse '" + text + "' as an integer");
  }
  return v;
}

std::vector<double> parse_doubles(std::string_view s, std::string_view what) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part, what));
  return out;
}

std::pair<std::string, std::string> split_head(std::string_view s) {
  const auto pos = s.find(':');
  if (pos == std::string_view::npos) return {trim(s), {}};
  return {trim(s.substr(0, pos)), trim(s.substr(pos + 1))};
}

}  // namespace amv::detail
