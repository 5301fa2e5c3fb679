#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ctxmine {

// UTC instants are carried as seconds since the Unix epoch.
using UtcSeconds = std::int64_t;

// Parses "YYYY-MM-DDTHH:MM:SS[.fff][Z|+hh:mm|-hh:mm]". Fractional seconds are
// truncated. Throws ParseError on malformed input.
UtcSeconds parse_iso8601(std::string_view text);

// Renders "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UtcSeconds t);

}  // namespace ctxmine
