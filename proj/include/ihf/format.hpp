#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ihf {

// Shortest text that parses back to the same double; locale independent.
std::string format_double(double v);

// Whole-string parse; nullopt on trailing garbage or an empty string.
std::optional<double> parse_double(std::string_view s);

}  // namespace ihf
