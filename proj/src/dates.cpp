#include "nml/dates.hpp"

#include <cstdio>

#include "nml/errors.hpp"

namespace nml {

// Civil <-> serial conversions after Howard Hinnant's chrono algorithms.
Date make_date(int y, unsigned m, unsigned d) {
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw DataError("make_date: invalid month/day " + std::to_string(m) + "/" + std::to_string(d));
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return Date(era * 146097 + static_cast<std::int32_t>(doe) - 719468);
}

CivilDate civil_from_date(Date date) {
    std::int32_t z = date.days + 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{y + (m <= 2), m, d};
}

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
        throw DataError("parse_date: expected ISO-8601 date, got '" + text + "'");
    return make_date(y, m, d);
}

std::string to_iso(Date d) {
    CivilDate c = civil_from_date(d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

} // namespace nml
