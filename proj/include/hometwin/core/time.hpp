#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hometwin::core {

using Minutes = std::chrono::minutes;

struct CivilDate {
    int year = 2000;
    unsigned month = 1;
    unsigned day = 1;

    bool valid() const;
    static CivilDate parse(std::string_view iso); // YYYY-MM-DD
    std::string to_string() const;
    auto operator<=>(const CivilDate&) const = default;
};

bool is_leap_year(int year);
unsigned days_in_month(int year, unsigned month);

struct CivilTime {
    CivilDate date;
    int hour = 0;
    int minute = 0;
};

/// UTC instant with minute resolution. Internally minutes since 1970-01-01T00:00Z.
class Timestamp {
public:
    constexpr Timestamp() = default;

    static constexpr Timestamp from_minutes(std::int64_t minutes) {
        Timestamp t;
        t.minutes_ = minutes;
        return t;
    }
    static Timestamp from_civil(const CivilDate& date, int hour = 0, int minute = 0);

    /// Accepts `YYYY-MM-DDTHH:MM[:SS[.fff]][Z|+00:00]`. Seconds are truncated.
    /// Offsets other than UTC are applied, so the result is always UTC.
    static Timestamp parse(std::string_view text);

    constexpr std::int64_t minutes() const { return minutes_; }
    CivilTime civil() const;
    CivilDate date() const { return civil().date; }
    int minute_of_day() const;
    Timestamp floor_to_day() const;

    /// RFC 3339 in UTC with a zero seconds field, e.g. `2022-03-07T12:00:00Z`.
    std::string to_string() const;

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp& operator+=(Minutes m) {
        minutes_ += m.count();
        return *this;
    }
    constexpr Timestamp& operator-=(Minutes m) {
        minutes_ -= m.count();
        return *this;
    }
    friend constexpr Timestamp operator+(Timestamp t, Minutes m) { return t += m; }
    friend constexpr Timestamp operator-(Timestamp t, Minutes m) { return t -= m; }
    friend constexpr Minutes operator-(Timestamp a, Timestamp b) {
        return Minutes{a.minutes_ - b.minutes_};
    }

    static constexpr Timestamp min() { return from_minutes(INT64_MIN / 4); }
    static constexpr Timestamp max() { return from_minutes(INT64_MAX / 4); }

private:
    std::int64_t minutes_ = 0;
};

constexpr int kMinutesPerDay = 1440;

} // namespace hometwin::core
