#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gridrl/errors.hpp"

namespace gridrl::data {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kHoursPerWeek = 168;
inline constexpr double kPriceCap = 250.0;  // GBP/MWh market cap

/// One hour of microgrid driving data.
struct TimeSeriesRecord {
    std::int64_t epoch_hour = 0;  // hours since 1970-01-01 00:00 UTC
    double demand_mwh = 0.0;
    double price_gbp_mwh = 0.0;
    double wind_ms = 0.0;
    double solar_wm2 = 0.0;
    double temp_c = 0.0;
    double humidity = 0.0;   // fraction 0..1
    double clearness = 0.0;  // fraction 0..1
};

/// Contiguous hourly series. Immutable after construction.
class TimeSeries {
public:
    TimeSeries() = default;
    /// Validates hourly contiguity; throws LoadError naming the first gap.
    explicit TimeSeries(std::vector<TimeSeriesRecord> records);

    const TimeSeriesRecord& at(std::size_t i) const { return records_.at(i); }
    const TimeSeriesRecord& operator[](std::size_t i) const { return records_[i]; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    std::size_t weeks() const { return records_.size() / kHoursPerWeek; }

    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

private:
    std::vector<TimeSeriesRecord> records_;
};

// -- timestamps ------------------------------------------------------------

/// Parses "YYYY-MM-DD HH:MM[:SS]" (T or space separator) to epoch hours.
/// Throws LoadError on malformed or non-whole-hour input.
std::int64_t parse_timestamp(std::string_view text);

/// Parses a bare "YYYY-MM-DD" date to the epoch day index.
std::int64_t parse_date(std::string_view text);

std::string format_timestamp(std::int64_t epoch_hour);

/// 0 = Monday ... 6 = Sunday.
int weekday_index(std::int64_t epoch_hour);
int hour_of_day(std::int64_t epoch_hour);
/// 0 at Monday 00:00, 167 at Sunday 23:00.
int hour_of_week(std::int64_t epoch_hour);

// -- calendar ----------------------------------------------------------------

/// Bank-holiday list. Loaded from a plain-text file of ISO dates
/// (one per line, '#' comments); default empty.
class HolidayCalendar {
public:
    HolidayCalendar() = default;
    static HolidayCalendar from_file(const std::string& path);
    static HolidayCalendar from_dates(const std::vector<std::string>& iso_dates);

    bool contains(std::int64_t epoch_day) const { return days_.count(epoch_day) > 0; }
    std::size_t size() const { return days_.size(); }

private:
    std::set<std::int64_t> days_;
};

/// 1 on an ordinary working day, 0 on Saturday/Sunday or a listed holiday.
int workday_flag(std::int64_t epoch_hour, const HolidayCalendar& holidays);

// -- CSV ---------------------------------------------------------------------

/// Fixed schema, in this order:
///   timestamp,demand_mwh,price_gbp_mwh,wind_ms,solar_wm2,temp_c,humidity,clearness
/// Prices are clamped into [0, 250]; any other bound violation is a LoadError
/// carrying the offending row number.
TimeSeries load_csv(const std::string& path);

void save_csv(const TimeSeries& series, const std::string& path);

}  // namespace gridrl::data
