#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classex {

// Doubles are printed with %.17g so round-trips and reruns are
// byte-stable.
std::string format_double(double x);

// Splits one CSV line on commas; no quoting, fields are trimmed of
// surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);

double parse_double_field(const std::string& field, const std::string& context);
std::int64_t parse_int_field(const std::string& field, const std::string& context);

// FNV-1a, used for the config hash recorded in output headers.
std::uint64_t fnv1a64(const std::string& text);

} // namespace classex
