#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace riverflow::csv {

/// Splits one CSV line on commas and trims surrounding whitespace (including a
/// trailing '\r') from each field. Quoting is not supported.
std::vector<std::string_view> split_fields(std::string_view line);

std::string_view trim(std::string_view s);

/// Parses a finite decimal number occupying the whole field. Throws ParseError
/// naming `what` on failure.
double parse_number(std::string_view field, std::string_view what);

/// Shortest decimal text that reads back to the identical double.
std::string format_number(double x);

/// printf-style "%.<digits>f".
std::string format_fixed(double x, int digits);

}  // namespace riverflow::csv
