#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentilag::csv {

/// Splits one RFC-4180 record (double-quoted fields, "" escapes). Trailing
/// CR is ignored.
std::vector<std::string> split(std::string_view line);

/// Quotes the field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

/// Shortest decimal form that round-trips to the same double.
std::string number(double v);

/// Whole-cell parse; surrounding blanks allowed. Throws Error on failure.
double parse_double(std::string_view cell);
long long parse_int(std::string_view cell);

std::string trim(std::string_view s);

}  // namespace sentilag::csv
