#include "pxt/dates.hpp"

#include <cctype>
#include <cstdio>

#include "pxt/errors.hpp"

namespace pxt {

const char* to_string(Frequency f) {
    switch (f) {
        case Frequency::daily: return "daily";
        case Frequency::monthly: return "monthly";
        case Frequency::quarterly: return "quarterly";
    }
    return "?";
}

Frequency frequency_from_string(const std::string& s) {
    if (s == "daily") return Frequency::daily;
    if (s == "monthly") return Frequency::monthly;
    if (s == "quarterly") return Frequency::quarterly;
    throw ConfigError("unknown frequency '" + s + "' (expected daily, monthly or quarterly)");
}

namespace {

bool all_digits(const std::string& s, size_t from, size_t to) {
    if (to > s.size() || from >= to) return false;
    for (size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

int to_int(const std::string& s, size_t from, size_t to) {
    int v = 0;
    for (size_t i = from; i < to; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

}  // namespace

Date parse_date(const std::string& text) {
    // YYYY-Qn
    if (text.size() == 7 && (text[5] == 'Q' || text[5] == 'q') && all_digits(text, 0, 4) &&
        all_digits(text, 6, 7) && text[4] == '-') {
        int q = to_int(text, 6, 7);
        if (q < 1 || q > 4) throw DataError("bad quarter in date '" + text + "'");
        return Date{to_int(text, 0, 4), q * 3, 0};
    }
    // YYYY-MM-DD
    if (text.size() == 10 && text[4] == '-' && text[7] == '-' && all_digits(text, 0, 4) &&
        all_digits(text, 5, 7) && all_digits(text, 8, 10)) {
        Date d{to_int(text, 0, 4), to_int(text, 5, 7), to_int(text, 8, 10)};
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
            throw DataError("bad calendar date '" + text + "'");
        return d;
    }
    // YYYY-MM
    if (text.size() == 7 && text[4] == '-' && all_digits(text, 0, 4) && all_digits(text, 5, 7)) {
        Date d{to_int(text, 0, 4), to_int(text, 5, 7), 0};
        if (d.month < 1 || d.month > 12) throw DataError("bad month in date '" + text + "'");
        return d;
    }
    // YYYYMM
    if (text.size() == 6 && all_digits(text, 0, 6)) {
        Date d{to_int(text, 0, 4), to_int(text, 4, 6), 0};
        if (d.month < 1 || d.month > 12) throw DataError("bad month in date '" + text + "'");
        return d;
    }
    throw DataError("unparseable date '" + text + "'");
}

std::string format_date(const Date& d, Frequency freq) {
    char buf[32];
    switch (freq) {
        case Frequency::daily:
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day > 0 ? d.day : 1);
            break;
        case Frequency::monthly:
            std::snprintf(buf, sizeof buf, "%04d-%02d", d.year, d.month);
            break;
        case Frequency::quarterly:
            std::snprintf(buf, sizeof buf, "%04d-Q%d", d.year, (d.month + 2) / 3);
            break;
    }
    return buf;
}

int quarter_of(const Date& d) {
    if (d.month % 3 != 0) throw DataError("date is not on a quarter-end month");
    return d.month / 3;
}

Date normalize_date(const Date& d, Frequency freq) {
    switch (freq) {
        case Frequency::daily:
            if (d.day == 0)
                throw DataError("daily series needs full dates, got " +
                                format_date(d, Frequency::monthly));
            return d;
        case Frequency::monthly:
            return Date{d.year, d.month, 0};
        case Frequency::quarterly:
            if (d.day == 0 && d.month % 3 != 0)
                throw DataError("quarterly date not on a quarter boundary: " +
                                format_date(d, Frequency::monthly));
            return Date{d.year, ((d.month + 2) / 3) * 3, 0};
    }
    return d;
}

}  // namespace pxt
