#include "hometwin/core/time.hpp"

#include "hometwin/core/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace hometwin {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::no_data: return "no_data";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::config: return "config";
    case ErrorCode::source: return "source";
    case ErrorCode::unauthorized: return "unauthorized";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::unavailable: return "unavailable";
    }
    return "unknown";
}

} // namespace hometwin

namespace hometwin::core {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
}

} // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

unsigned days_in_month(int year, unsigned month) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) {
        return 0;
    }
    if (month == 2 && is_leap_year(year)) {
        return 29;
    }
    return kDays[month - 1];
}

bool CivilDate::valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

CivilDate CivilDate::parse(std::string_view iso) {
    if (iso.size() != 10) {
        throw Error(ErrorCode::invalid_argument, "malformed date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    CivilDate d;
    d.year = parse_int(iso, 0, 4, iso);
    expect_char(iso, 4, '-', iso);
    d.month = static_cast<unsigned>(parse_int(iso, 5, 2, iso));
    expect_char(iso, 7, '-', iso);
    d.day = static_cast<unsigned>(parse_int(iso, 8, 2, iso));
    if (!d.valid()) {
        throw Error(ErrorCode::invalid_argument, "invalid calendar date '" + std::string(iso) + "'");
    }
    return d;
}

std::string CivilDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
}

Timestamp Timestamp::from_civil(const CivilDate& date, int hour, int minute) {
    using namespace std::chrono;
    if (!date.valid()) {
        throw Error(ErrorCode::invalid_argument, "invalid calendar date " + date.to_string());
    }
    const sys_days days{year{date.year} / month{date.month} / day{date.day}};
    return from_minutes(static_cast<std::int64_t>(days.time_since_epoch().count()) * kMinutesPerDay +
                        hour * 60 + minute);
}

CivilTime Timestamp::civil() const {
    using namespace std::chrono;
    const std::int64_t day_index = floor_div(minutes_, kMinutesPerDay);
    const std::int64_t in_day = minutes_ - day_index * kMinutesPerDay;
    const year_month_day ymd{sys_days{days{day_index}}};
    CivilTime out;
    out.date.year = static_cast<int>(ymd.year());
    out.date.month = static_cast<unsigned>(ymd.month());
    out.date.day = static_cast<unsigned>(ymd.day());
    out.hour = static_cast<int>(in_day / 60);
    out.minute = static_cast<int>(in_day % 60);
    return out;
}

int Timestamp::minute_of_day() const {
    return static_cast<int>(minutes_ - floor_div(minutes_, kMinutesPerDay) * kMinutesPerDay);
}

Timestamp Timestamp::floor_to_day() const {
    return from_minutes(floor_div(minutes_, kMinutesPerDay) * kMinutesPerDay);
}

std::string Timestamp::to_string() const {
    const CivilTime c = civil();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00Z", c.date.year, c.date.month, c.date.day,
                  c.hour, c.minute);
    return buf;
}

Timestamp Timestamp::parse(std::string_view text) {
    const std::string_view whole = text;
    if (text.size() < 16) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
    const CivilDate date = CivilDate::parse(text.substr(0, 10));
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
    const int hour = parse_int(text, 11, 2, whole);
    expect_char(text, 13, ':', whole);
    const int minute = parse_int(text, 14, 2, whole);
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        const int second = parse_int(text, pos + 1, 2, whole);
        if (second > 60) {
            throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
        }
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
        }
    }
    if (hour > 23 || minute > 59) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
    }
    int offset_minutes = 0;
    if (pos < text.size()) {
        const char z = text[pos];
        if ((z == 'Z' || z == 'z') && pos + 1 == text.size()) {
            // UTC
        } else if ((z == '+' || z == '-') && pos + 6 == text.size()) {
            const int oh = parse_int(text, pos + 1, 2, whole);
            expect_char(text, pos + 3, ':', whole);
            const int om = parse_int(text, pos + 4, 2, whole);
            offset_minutes = (z == '+' ? 1 : -1) * (oh * 60 + om);
        } else {
            throw Error(ErrorCode::invalid_argument, "malformed timestamp '" + std::string(whole) + "'");
        }
    }
    return from_civil(date, hour, minute) - Minutes{offset_minutes};
}

} // namespace hometwin::core
