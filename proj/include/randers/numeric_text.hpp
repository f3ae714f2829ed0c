#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace randers {

// Shortest text that parses back to exactly `x`.
std::string shortest(double x);
// Seventeen significant digits, the CSV convention.
std::string full_precision(double x);
// Strict parse of a whole token; nullopt on trailing garbage. Accepts nan/inf.
std::optional<double> parse_double(std::string_view text);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace randers
