#include "gridrl/data/time_series.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

namespace gridrl::data {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

int parse_int(std::string_view s, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw LoadError(std::string("bad ") + what + " in timestamp: '" + std::string(s) + "'");
    }
    return value;
}

std::int64_t days_from_ymd(int y, int m, int d, std::string_view original) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw LoadError("invalid calendar date: '" + std::string(original) + "'");
    }
    return sys_days{ymd}.time_since_epoch().count();
}

}  // namespace

TimeSeries::TimeSeries(std::vector<TimeSeriesRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 1; i < records_.size(); ++i) {
        if (records_[i].epoch_hour != records_[i - 1].epoch_hour + 1) {
            throw LoadError("time series is not hourly-contiguous at hour " + std::to_string(i) +
                            " (" + format_timestamp(records_[i - 1].epoch_hour) + " -> " +
                            format_timestamp(records_[i].epoch_hour) + ")");
        }
    }
}

std::int64_t parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw LoadError("expected ISO date YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const int y = parse_int(text.substr(0, 4), "year");
    const int m = parse_int(text.substr(5, 2), "month");
    const int d = parse_int(text.substr(8, 2), "day");
    return days_from_ymd(y, m, d, text);
}

std::int64_t parse_timestamp(std::string_view text) {
    // YYYY-MM-DD<sep>HH:MM with optional :SS
    if (text.size() < 16 || (text[10] != ' ' && text[10] != 'T')) {
        throw LoadError("expected timestamp YYYY-MM-DD HH:MM, got '" + std::string(text) + "'");
    }
    const std::int64_t day = parse_date(text.substr(0, 10));
    const int hh = parse_int(text.substr(11, 2), "hour");
    const int mm = parse_int(text.substr(14, 2), "minute");
    int ss = 0;
    if (text.size() > 16) {
        if (text.size() != 19 || text[16] != ':') {
            throw LoadError("trailing junk in timestamp: '" + std::string(text) + "'");
        }
        ss = parse_int(text.substr(17, 2), "second");
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59) {
        throw LoadError("out-of-range time in '" + std::string(text) + "'");
    }
    if (mm != 0 || ss != 0) {
        throw LoadError("records must be on whole hours, got '" + std::string(text) + "'");
    }
    return day * 24 + hh;
}

std::string format_timestamp(std::int64_t epoch_hour) {
    using namespace std::chrono;
    const std::int64_t day = floor_div(epoch_hour, 24);
    const int hh = static_cast<int>(epoch_hour - day * 24);
    const year_month_day ymd{sys_days{days{day}}};
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh);
    return buf;
}

int weekday_index(std::int64_t epoch_hour) {
    // 1970-01-01 was a Thursday; Monday = 0.
    const std::int64_t day = floor_div(epoch_hour, 24);
    return static_cast<int>(((day + 3) % 7 + 7) % 7);
}

int hour_of_day(std::int64_t epoch_hour) {
    return static_cast<int>(((epoch_hour % 24) + 24) % 24);
}

int hour_of_week(std::int64_t epoch_hour) {
    return weekday_index(epoch_hour) * 24 + hour_of_day(epoch_hour);
}

HolidayCalendar HolidayCalendar::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open holiday file: " + path);
    HolidayCalendar cal;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        cal.days_.insert(parse_date(std::string_view(line).substr(start)));
    }
    return cal;
}

HolidayCalendar HolidayCalendar::from_dates(const std::vector<std::string>& iso_dates) {
    HolidayCalendar cal;
    for (const auto& d : iso_dates) cal.days_.insert(parse_date(d));
    return cal;
}

int workday_flag(std::int64_t epoch_hour, const HolidayCalendar& holidays) {
    const int wd = weekday_index(epoch_hour);
    if (wd >= 5) return 0;  // Saturday, Sunday
    if (holidays.contains(floor_div(epoch_hour, 24))) return 0;
    return 1;
}

namespace {

const char* kCsvHeader =
    "timestamp,demand_mwh,price_gbp_mwh,wind_ms,solar_wm2,temp_c,humidity,clearness";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& s, std::size_t row, const char* name) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\r')) ++pos;
        if (pos != s.size()) throw std::invalid_argument("junk");
        return v;
    } catch (const std::exception&) {
        throw LoadError("row " + std::to_string(row) + ": unparseable " + name + " '" + s + "'");
    }
}

void require(bool ok, std::size_t row, const std::string& msg) {
    if (!ok) throw LoadError("row " + std::to_string(row) + ": " + msg);
}

}  // namespace

TimeSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw LoadError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw LoadError(path + ": header mismatch; expected '" + std::string(kCsvHeader) +
                        "', got '" + line + "'");
    }

    std::vector<TimeSeriesRecord> records;
    std::size_t row = 1;  // header was row 0
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            ++row;
            continue;
        }
        const auto fields = split_csv_line(line);
        require(fields.size() == 8, row,
                "expected 8 columns, got " + std::to_string(fields.size()));

        TimeSeriesRecord rec;
        try {
            rec.epoch_hour = parse_timestamp(fields[0]);
        } catch (const LoadError& e) {
            throw LoadError("row " + std::to_string(row) + ": " + e.what());
        }
        rec.demand_mwh = parse_field(fields[1], row, "demand_mwh");
        rec.price_gbp_mwh = parse_field(fields[2], row, "price_gbp_mwh");
        rec.wind_ms = parse_field(fields[3], row, "wind_ms");
        rec.solar_wm2 = parse_field(fields[4], row, "solar_wm2");
        rec.temp_c = parse_field(fields[5], row, "temp_c");
        rec.humidity = parse_field(fields[6], row, "humidity");
        rec.clearness = parse_field(fields[7], row, "clearness");

        require(rec.demand_mwh >= 0.0, row, "negative demand");
        require(rec.wind_ms >= 0.0, row, "negative wind speed");
        require(rec.solar_wm2 >= 0.0, row, "negative solar radiation");
        require(rec.humidity >= 0.0 && rec.humidity <= 1.0, row, "humidity outside [0,1]");
        require(rec.clearness >= 0.0 && rec.clearness <= 1.0, row, "clearness outside [0,1]");
        // market rule: cap the price, do not reject the row
        rec.price_gbp_mwh = std::min(std::max(rec.price_gbp_mwh, 0.0), kPriceCap);

        if (!records.empty() && rec.epoch_hour != records.back().epoch_hour + 1) {
            throw LoadError("row " + std::to_string(row) + ": timestamp gap at hour " +
                            std::to_string(records.size()) + "; expected " +
                            format_timestamp(records.back().epoch_hour + 1) + ", got " +
                            format_timestamp(rec.epoch_hour));
        }
        records.push_back(rec);
        ++row;
    }
    if (records.empty()) throw LoadError(path + ": no data rows");
    return TimeSeries(std::move(records));
}

void save_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write data file: " + path);
    out << kCsvHeader << '\n';
    char buf[256];
    for (const auto& r : series) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                      format_timestamp(r.epoch_hour).c_str(), r.demand_mwh, r.price_gbp_mwh,
                      r.wind_ms, r.solar_wm2, r.temp_c, r.humidity, r.clearness);
        out << buf << '\n';
    }
}

}  // namespace gridrl::data
