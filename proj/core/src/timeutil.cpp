#include "ctxmine/timeutil.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "ctxmine/errors.hpp"

namespace ctxmine {
namespace {

// Howard Hinnant's civil-day algorithm; avoids timegm portability questions.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

int expect_digits(std::string_view s, std::size_t& i, int count) {
    int value = 0;
    for (int k = 0; k < count; ++k) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw ParseError("malformed ISO-8601 timestamp: " + std::string(s));
        }
        value = value * 10 + (s[i] - '0');
        ++i;
    }
    return value;
}

void expect_char(std::string_view s, std::size_t& i, char c) {
    if (i >= s.size() || s[i] != c) {
        throw ParseError("malformed ISO-8601 timestamp: " + std::string(s));
    }
    ++i;
}

}  // namespace

UtcSeconds parse_iso8601(std::string_view text) {
    std::size_t i = 0;
    const int year = expect_digits(text, i, 4);
    expect_char(text, i, '-');
    const int month = expect_digits(text, i, 2);
    expect_char(text, i, '-');
    const int day = expect_digits(text, i, 2);
    int hour = 0, minute = 0, second = 0;
    std::int64_t offset = 0;
    if (i < text.size()) {
        if (text[i] != 'T' && text[i] != ' ') {
            throw ParseError("malformed ISO-8601 timestamp: " + std::string(text));
        }
        ++i;
        hour = expect_digits(text, i, 2);
        expect_char(text, i, ':');
        minute = expect_digits(text, i, 2);
        expect_char(text, i, ':');
        second = expect_digits(text, i, 2);
        if (i < text.size() && text[i] == '.') {
            ++i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
        if (i < text.size()) {
            if (text[i] == 'Z') {
                ++i;
            } else if (text[i] == '+' || text[i] == '-') {
                const int sign = text[i] == '+' ? 1 : -1;
                ++i;
                const int oh = expect_digits(text, i, 2);
                if (i < text.size() && text[i] == ':') ++i;
                int om = 0;
                if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                    om = expect_digits(text, i, 2);
                }
                offset = sign * (oh * 3600 + om * 60);
            }
        }
    }
    if (i != text.size() || month < 1 || month > 12 || day < 1 || day > 31) {
        throw ParseError("malformed ISO-8601 timestamp: " + std::string(text));
    }
    const std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_iso8601(UtcSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t year;
    int month, day;
    civil_from_days(days, year, month, day);
    const int hour = static_cast<int>(rem / 3600);
    const int minute = static_cast<int>((rem % 3600) / 60);
    const int second = static_cast<int>(rem % 60);
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(year), month, day, hour, minute, second);
    return std::string(buf.data());
}

}  // namespace ctxmine
