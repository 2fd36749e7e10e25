#pragma once

#include <compare>
#include <string>

namespace pxt {

enum class Frequency { daily, monthly, quarterly };

const char* to_string(Frequency f);
Frequency frequency_from_string(const std::string& s);

// Calendar date at the granularity of the owning series. Monthly and
// quarterly observations carry day == 0; quarterly dates are stored on the
// quarter-end month (3, 6, 9, 12).
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
};

// Accepts YYYY-MM-DD, YYYY-MM, YYYYMM and YYYY-Qn.
Date parse_date(const std::string& text);

// Reduce a date to the granularity of `freq`: monthly drops the day,
// quarterly additionally requires (or snaps a day-carrying date to) the
// quarter-end month. Daily dates must carry a day.
Date normalize_date(const Date& d, Frequency freq);

std::string format_date(const Date& d, Frequency freq);

// 1..4 for a quarter-end month, throws otherwise.
int quarter_of(const Date& d);

}  // namespace pxt
