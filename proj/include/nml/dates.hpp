#ifndef NML_DATES_HPP
#define NML_DATES_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace nml {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
/// Light value type; arithmetic is in whole days.
struct Date {
    std::int32_t days = 0;

    Date() = default;
    explicit constexpr Date(std::int32_t d) : days(d) {}

    auto operator<=>(const Date&) const = default;

    constexpr Date operator+(int n) const { return Date(days + n); }
    constexpr Date operator-(int n) const { return Date(days - n); }
    constexpr int operator-(Date other) const { return days - other.days; }

    /// 0=Sunday .. 6=Saturday. 1970-01-01 was a Thursday.
    int weekday() const {
        int w = (days + 4) % 7;
        return w < 0 ? w + 7 : w;
    }
    bool is_friday() const { return weekday() == 5; }

    /// Friday that ends the week containing this date (weeks are (prev Fri, Fri]).
    Date week_friday() const {
        int w = weekday();
        int ahead = (5 - w + 7) % 7;
        return *this + ahead;
    }
};

/// Build a Date from a civil year/month/day triple.
Date make_date(int year, unsigned month, unsigned day);

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};
CivilDate civil_from_date(Date d);

/// Parse "YYYY-MM-DD"; also accepts a full ISO-8601 timestamp, using the date part.
Date parse_date(const std::string& text);

std::string to_iso(Date d);

} // namespace nml

#endif
