#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vorres {

// Shortest round-trip decimal form of a double (locale independent).
std::string format_double(double v);
// Strict parse of a whole field; throws DataError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what = "number");
long parse_long(std::string_view s, std::string_view what = "integer");

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace vorres
