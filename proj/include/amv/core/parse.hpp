#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace amv::detail {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Strict double parse; "inf"/"-inf" accepted. Throws ConfigError naming `what`.
double parse_double(std::string_view s, std::string_view what);
long parse_long(std::string_view s, std::string_view what);
std::vector<double> parse_doubles(std::string_view s, std::string_view what);
/// Splits "head:args" into (head, args); args empty if no colon.
std::pair<std::string, std::string> split_head(std::string_view s);

}  // namespace amv::detail
