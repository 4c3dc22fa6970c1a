#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tkg {

std::string_view trim(std::string_view s);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

// Iterates lines without their terminators; handles trailing newline-less text.
std::vector<std::string_view> split_lines(std::string_view text);

std::size_t levenshtein(std::string_view a, std::string_view b);

// Surfaces within edit distance <= max_dist of `needle`, nearest first.
std::vector<std::string> nearest_strings(std::string_view needle,
                                         const std::vector<std::string>& pool,
                                         std::size_t max_dist, std::size_t max_results);

std::string json_escape(std::string_view s);

// Fixed-point with `decimals` fraction digits (printf rounding).
std::string format_fixed(double x, int decimals);

// Scientific notation with the mantissa truncated (not rounded) to two
// decimals, e.g. 5.3459e-05 -> "5.34e-05".
std::string format_sci_trunc2(double x);

// Shortest round-trip-exact representation (%.17g); used for byte-stable
// structured output.
std::string format_exact(double x);

}  // namespace tkg
