#include "pxt/bars.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "pxt/errors.hpp"

namespace pxt {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    auto flush = [&] {
        size_t b = field.find_first_not_of(" \t\r");
        size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
        field.clear();
    };
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.find_first_not_of(" \t") == std::string::npos) {
            field.clear();
            quoted = true;
        } else if (c == ',') {
            flush();
        } else {
            field += c;
        }
    }
    flush();
    return out;
}

double parse_price(const std::string& s, size_t row, const std::string& col) {
    // tolerate thousands separators ("1,073.20") but nothing looser
    std::string cleaned = s;
    for (size_t c = cleaned.find(','); c != std::string::npos; c = cleaned.find(',', c)) {
        bool grouped = c + 3 < cleaned.size() && std::isdigit((unsigned char)cleaned[c + 1]) &&
                       std::isdigit((unsigned char)cleaned[c + 2]) &&
                       std::isdigit((unsigned char)cleaned[c + 3]);
        if (!grouped) break;
        cleaned.erase(c, 1);
    }
    try {
        size_t pos = 0;
        double v = std::stod(cleaned, &pos);
        if (pos != cleaned.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(row) + ": column '" + col +
                        "' value '" + s + "' is not a number");
    }
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "na" || s == ".";
}

}  // namespace

void validate_bar(const OhlcBar& b, size_t row) {
    auto where = [&] { return row ? " (row " + std::to_string(row) + ")" : std::string(); };
    if (!(b.open > 0.0) || !(b.high > 0.0) || !(b.low > 0.0) || !(b.close > 0.0))
        throw DataError("non-positive price" + where());
    if (b.low > std::min(b.open, b.close))
        throw DataError("low above min(open, close)" + where());
    if (b.high < std::max(b.open, b.close))
        throw DataError("high below max(open, close)" + where());
}

std::vector<double> BarSeries::closes() const {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(b.close);
    return out;
}

std::vector<Date> BarSeries::dates() const {
    std::vector<Date> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(b.date);
    return out;
}

BarSeries load_bars(const std::string& path, Frequency frequency) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    BarSeries series;
    series.frequency = frequency;
    std::string line;
    size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (!header_seen) {
            header_seen = true;
            const char* expected[5] = {"date", "open", "high", "low", "close"};
            bool ok = fields.size() >= 5;
            for (size_t j = 0; ok && j < 5; ++j) {
                std::string name = fields[j];
                for (char& c : name) c = static_cast<char>(std::tolower((unsigned char)c));
                ok = name == expected[j];
            }
            if (!ok)
                throw DataError("'" + path + "': expected header date,open,high,low,close, got '" +
                                line + "'");
            continue;
        }
        if (fields.size() < 5)
            throw DataError("row " + std::to_string(row) + ": expected 5 columns, got " +
                            std::to_string(fields.size()));
        OhlcBar bar;
        bar.date = normalize_date(parse_date(fields[0]), frequency);
        bar.open = parse_price(fields[1], row, "open");
        bar.high = parse_price(fields[2], row, "high");
        bar.low = parse_price(fields[3], row, "low");
        bar.close = parse_price(fields[4], row, "close");
        validate_bar(bar, row);
        if (!series.bars.empty() && !(series.bars.back().date < bar.date))
            throw DataError("row " + std::to_string(row) + ": dates not strictly increasing");
        series.bars.push_back(bar);
    }
    if (!header_seen) throw DataError("'" + path + "' is empty");
    return series;
}

void write_bars(const BarSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "date,open,high,low,close\n";
    char buf[160];
    for (const auto& b : series.bars) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n",
                      format_date(b.date, series.frequency).c_str(), b.open, b.high, b.low,
                      b.close);
        out << buf;
    }
}

BarSeries to_quarterly(const BarSeries& monthly, std::string* warning) {
    if (monthly.frequency != Frequency::monthly)
        throw DataError("to_quarterly: input series is not monthly");
    if (monthly.bars.empty()) throw DataError("to_quarterly: empty series");
    if (monthly.bars.front().date.month % 3 != 1)
        throw DataError("to_quarterly: series must start on a quarter's first month, got " +
                        format_date(monthly.bars.front().date, Frequency::monthly));
    const size_t n = monthly.bars.size();
    const size_t whole = n / 3;
    if (warning && n % 3 != 0)
        *warning = "dropped trailing partial quarter (" + std::to_string(n % 3) + " month(s))";
    BarSeries q;
    q.frequency = Frequency::quarterly;
    q.bars.reserve(whole);
    for (size_t i = 0; i < whole; ++i) {
        const OhlcBar& a = monthly.bars[3 * i];
        const OhlcBar& b = monthly.bars[3 * i + 1];
        const OhlcBar& c = monthly.bars[3 * i + 2];
        OhlcBar bar;
        bar.date = Date{c.date.year, c.date.month, 0};
        bar.open = a.open;
        bar.close = c.close;
        bar.high = std::max({a.high, b.high, c.high});
        bar.low = std::min({a.low, b.low, c.low});
        validate_bar(bar);
        q.bars.push_back(bar);
    }
    return q;
}

PredictorTable load_predictors(const std::string& path, const BarSeries& calendar) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    auto header = split_csv(line);
    if (header.size() < 2) throw DataError("'" + path + "': need a date column and at least one predictor");
    std::set<std::string> seen;
    for (size_t j = 1; j < header.size(); ++j)
        if (!seen.insert(header[j]).second)
            throw DataError("'" + path + "': duplicate column name '" + header[j] + "'");

    std::map<Date, size_t> calendar_index;
    for (size_t i = 0; i < calendar.bars.size(); ++i) calendar_index[calendar.bars[i].date] = i;

    const size_t n_cols = header.size() - 1;
    const size_t n_rows = calendar.bars.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> columns(n_cols, std::vector<double>(n_rows, nan));

    size_t row = 1, dropped = 0, matched = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(fields.size()));
        Date d;
        try {
            d = normalize_date(parse_date(fields[0]), calendar.frequency);
        } catch (const DataError&) {
            ++dropped;  // e.g. a monthly row while aligning to quarters
            continue;
        }
        auto it = calendar_index.find(d);
        if (it == calendar_index.end()) {
            ++dropped;
            continue;
        }
        ++matched;
        for (size_t j = 0; j < n_cols; ++j) {
            const std::string& s = fields[j + 1];
            columns[j][it->second] = is_missing(s) ? nan : parse_price(s, row, header[j + 1]);
        }
    }
    if (matched == 0) throw DataError("'" + path + "': no dates overlap the calendar");

    PredictorTable table;
    table.dropped_rows = dropped;
    for (size_t j = 0; j < n_cols; ++j) {
        PredictorSeries s;
        s.name = header[j + 1];
        s.values = std::move(columns[j]);
        for (double v : s.values)
            if (std::isnan(v)) ++s.n_missing;
        table.series.push_back(std::move(s));
    }
    return table;
}

}  // namespace pxt
