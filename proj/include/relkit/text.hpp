#pragma once

#include <string>
#include <string_view>

namespace relkit::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses every run of whitespace to a single space and trims both ends.
std::string collapse_whitespace(std::string_view s);

/// Lowercase, collapse whitespace, strip leading/trailing ASCII punctuation.
std::string normalize(std::string_view s);

} // namespace relkit::text
