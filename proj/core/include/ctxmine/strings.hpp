#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctxmine {

// Collapses every maximal whitespace run to a single space and trims both ends.
std::string collapse_whitespace(std::string_view text);

std::string to_lower_ascii(std::string_view text);

bool contains_ci(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view text, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// FNV-1a over the input, rendered as 16 hex digits. Stable across runs and
// platforms; used for instance ids.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace ctxmine
