#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gridrl/data/observation.hpp"
#include "gridrl/data/synthetic.hpp"
#include "gridrl/data/time_series.hpp"
#include "gridrl/rng.hpp"
#include "test_util.hpp"

using namespace gridrl;
using namespace gridrl::data;

namespace {

std::string make_csv(int hours, double price = 40.0, int skip_hour = -1) {
    std::ostringstream out;
    out << "timestamp,demand_mwh,price_gbp_mwh,wind_ms,solar_wm2,temp_c,humidity,clearness\n";
    const std::int64_t start = 16076 * 24;  // 2014-01-06 00:00, Monday
    for (int h = 0; h < hours; ++h) {
        if (h == skip_hour) continue;
        out << format_timestamp(start + h) << ",2.5," << price << ",5.0,200,10,0.7,0.5\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("timestamp parsing and formatting") {
    const auto h = parse_timestamp("2014-01-06 00:00");
    CHECK(h == 16076 * 24);
    CHECK(format_timestamp(h) == "2014-01-06 00:00");
    CHECK(parse_timestamp("2014-01-06T13:00") == h + 13);
    CHECK(parse_timestamp("2014-01-06 13:00:00") == h + 13);
    CHECK(weekday_index(h) == 0);  // Monday
    CHECK(hour_of_week(h) == 0);
    CHECK(hour_of_week(h + 167) == 167);
    CHECK_THROWS_AS(parse_timestamp("2014-01-06 13:30"), LoadError);
    CHECK_THROWS_AS(parse_timestamp("2014-13-06 13:00"), LoadError);
    CHECK_THROWS_AS(parse_timestamp("garbage"), LoadError);
}

TEST_CASE("workday flag") {
    HolidayCalendar none;
    const std::int64_t monday = 16076 * 24;
    CHECK(workday_flag(monday, none) == 1);                      // ordinary Monday
    CHECK(workday_flag(monday + 24, none) == 1);                 // ordinary Tuesday
    CHECK(workday_flag(monday + 5 * 24, none) == 0);             // Saturday
    CHECK(workday_flag(monday + 6 * 24 + 13, none) == 0);        // Sunday afternoon
    const auto holidays = HolidayCalendar::from_dates({"2014-01-08"});  // a Wednesday
    CHECK(workday_flag(monday + 2 * 24, holidays) == 0);
    CHECK(workday_flag(monday + 3 * 24, holidays) == 1);
}

TEST_CASE("holiday file parsing") {
    testutil::TempDir tmp("holidays");
    testutil::write_file(tmp.file("h.txt"), "# UK bank holidays\n2014-12-25\n 2014-12-26 \n\n");
    const auto cal = HolidayCalendar::from_file(tmp.file("h.txt"));
    CHECK(cal.size() == 2);
    CHECK(cal.contains(parse_date("2014-12-25")));
}

TEST_CASE("load_csv ingests a well-formed week") {
    testutil::TempDir tmp("csv");
    testutil::write_file(tmp.file("week.csv"), make_csv(168));
    const auto series = load_csv(tmp.file("week.csv"));
    CHECK(series.size() == 168);
    CHECK(series.weeks() == 1);
    CHECK(series[0].demand_mwh == 2.5);
}

TEST_CASE("load_csv clamps prices above the market cap") {
    testutil::TempDir tmp("csv_cap");
    testutil::write_file(tmp.file("d.csv"), make_csv(24, 300.0));
    const auto series = load_csv(tmp.file("d.csv"));
    for (const auto& r : series) CHECK(r.price_gbp_mwh == 250.0);
}

TEST_CASE("load_csv reports a timeline gap with the hour") {
    testutil::TempDir tmp("csv_gap");
    testutil::write_file(tmp.file("d.csv"), make_csv(24, 40.0, /*skip_hour=*/5));
    CHECK_THROWS_WITH_AS(load_csv(tmp.file("d.csv")),
                         doctest::Contains("gap at hour 5"), LoadError);
}

TEST_CASE("load_csv rejects bad headers and bad rows") {
    testutil::TempDir tmp("csv_bad");
    testutil::write_file(tmp.file("h.csv"), "time,demand\n");
    CHECK_THROWS_WITH_AS(load_csv(tmp.file("h.csv")), doctest::Contains("header mismatch"),
                         LoadError);

    auto csv = make_csv(3);
    csv += "2014-01-06 03:00,not_a_number,40,5,200,10,0.7,0.5\n";
    testutil::write_file(tmp.file("r.csv"), csv);
    CHECK_THROWS_WITH_AS(load_csv(tmp.file("r.csv")), doctest::Contains("row 4"), LoadError);

    auto neg = make_csv(1);
    neg += "2014-01-06 01:00,-1,40,5,200,10,0.7,0.5\n";
    testutil::write_file(tmp.file("n.csv"), neg);
    CHECK_THROWS_AS(load_csv(tmp.file("n.csv")), LoadError);
}

TEST_CASE("csv round trip preserves values") {
    testutil::TempDir tmp("csv_rt");
    SyntheticConfig cfg;
    cfg.weeks = 1;
    cfg.seed = 7;
    const auto series = generate_synthetic(cfg);
    save_csv(series, tmp.file("s.csv"));
    const auto loaded = load_csv(tmp.file("s.csv"));
    REQUIRE(loaded.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(loaded[i].epoch_hour == series[i].epoch_hour);
        CHECK(loaded[i].demand_mwh == series[i].demand_mwh);
        CHECK(loaded[i].price_gbp_mwh == series[i].price_gbp_mwh);
        CHECK(loaded[i].wind_ms == series[i].wind_ms);
    }
}

TEST_CASE("synthetic generation is reproducible per seed") {
    SyntheticConfig cfg;
    cfg.weeks = 2;
    cfg.seed = 42;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].demand_mwh == b[i].demand_mwh);
        CHECK(a[i].price_gbp_mwh == b[i].price_gbp_mwh);
        CHECK(a[i].wind_ms == b[i].wind_ms);
        CHECK(a[i].solar_wm2 == b[i].solar_wm2);
    }
    cfg.seed = 43;
    const auto c = generate_synthetic(cfg);
    bool all_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) all_same &= a[i].price_gbp_mwh == c[i].price_gbp_mwh;
    CHECK_FALSE(all_same);
}

TEST_CASE("zero price volatility gives a constant price") {
    SyntheticConfig cfg;
    cfg.weeks = 1;
    cfg.seed = 3;
    cfg.price_volatility = 0.0;
    const auto series = generate_synthetic(cfg);
    for (const auto& r : series) CHECK(r.price_gbp_mwh == doctest::Approx(cfg.price_mean));
}

TEST_CASE("long synthetic run hits all three wind regimes") {
    SyntheticConfig cfg;
    cfg.weeks = 200;
    cfg.seed = 5;
    const auto series = generate_synthetic(cfg);
    int below = 0, cubic = 0, rated = 0;
    for (const auto& r : series) {
        if (r.wind_ms < 3.0) ++below;
        else if (r.wind_ms < 12.0) ++cubic;
        else if (r.wind_ms <= 25.0) ++rated;
    }
    CHECK(below > 0);
    CHECK(cubic > 0);
    CHECK(rated > 0);
}

TEST_CASE("synthetic demand is periodic: weekday vs weekend, midday vs night") {
    SyntheticConfig cfg;
    cfg.weeks = 20;
    cfg.seed = 11;
    const auto series = generate_synthetic(cfg);
    double weekday = 0, weekend = 0, midday = 0, night = 0;
    int n_weekday = 0, n_weekend = 0, n_midday = 0, n_night = 0;
    for (const auto& r : series) {
        if (weekday_index(r.epoch_hour) < 5) {
            weekday += r.demand_mwh;
            ++n_weekday;
        } else {
            weekend += r.demand_mwh;
            ++n_weekend;
        }
        const int hod = hour_of_day(r.epoch_hour);
        if (hod == 13) {
            midday += r.demand_mwh;
            ++n_midday;
        }
        if (hod == 3) {
            night += r.demand_mwh;
            ++n_night;
        }
    }
    CHECK(weekday / n_weekday > weekend / n_weekend);
    CHECK(midday / n_midday > night / n_night);
}

TEST_CASE("normalization follows the paper's scaling rules") {
    env::GridConfig grid;
    HolidayCalendar none;
    TimeSeriesRecord rec;
    rec.epoch_hour = 16076 * 24;  // Monday 00:00
    rec.demand_mwh = 2.5;
    rec.price_gbp_mwh = 125.0;

    const auto obs = normalize_observation(5.0, rec, 0.0, 0.0, grid, none);
    REQUIRE(obs.size() == 8);
    CHECK(obs[Observation::kCharge] == 1.0);        // full battery -> 1.0
    CHECK(obs[Observation::kDemand] == 0.5);
    CHECK(obs[Observation::kPrice] == 0.5);         // half the cap
    CHECK(obs[Observation::kHourOfDay] == 0.0);
    CHECK(obs[Observation::kHourOfWeek] == 0.0);    // Monday hour 0 begins at 0
    CHECK(obs[Observation::kWorkday] == 1.0);

    TimeSeriesRecord sunday = rec;
    sunday.epoch_hour += 6 * 24 + 23;
    const auto end = normalize_observation(0.0, sunday, 0.0, 0.0, grid, none);
    CHECK(end[Observation::kHourOfDay] == 1.0);
    CHECK(end[Observation::kHourOfWeek] == 1.0);  // week ends at 1
    CHECK(end[Observation::kWorkday] == 0.0);
}

TEST_CASE("normalization with forecasts yields 12 components") {
    env::GridConfig grid;
    HolidayCalendar none;
    TimeSeriesRecord rec;
    rec.epoch_hour = 16076 * 24;
    Forecasts fc{0.3, 0.4, 0.1, 0.2};
    const auto obs = normalize_observation(1.0, rec, 0.0, 0.0, grid, none, fc);
    REQUIRE(obs.size() == 12);
    CHECK(obs[Observation::kDemandNext] == 0.3);
    CHECK(obs[Observation::kPriceNext] == 0.2);
}

TEST_CASE("out-of-bound raw values violate the contract") {
    env::GridConfig grid;
    HolidayCalendar none;
    TimeSeriesRecord rec;
    rec.epoch_hour = 16076 * 24;
    CHECK_THROWS_AS(normalize_observation(5.5, rec, 0.0, 0.0, grid, none), ContractViolation);
    rec.demand_mwh = 7.0;
    CHECK_THROWS_AS(normalize_observation(0.0, rec, 0.0, 0.0, grid, none), ContractViolation);
}

TEST_CASE("every observation component stays in the unit box") {
    SyntheticConfig cfg;
    cfg.weeks = 8;
    cfg.seed = 9;
    const auto series = generate_synthetic(cfg);
    env::GridConfig grid;
    HolidayCalendar none;
    Rng rng(1);
    for (const auto& r : series) {
        const double charge = rng.uniform(0.0, grid.c_max_mwh);
        const double pv = std::min(r.solar_wm2 / grid.pv_reference_wm2 * grid.pv_capacity_mw,
                                   grid.pv_capacity_mw);
        const double wt = std::min(2.5, grid.c_max_mwh);  // any in-range generation value
        const auto obs = normalize_observation(charge, r, pv, wt, grid, none);
        for (double v : obs.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("normalization round-trips for charge, demand and price") {
    env::GridConfig grid;
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const double e = rng.uniform(0.0, grid.c_max_mwh);
        const double p = rng.uniform(0.0, grid.p_max);
        CHECK(denormalize_energy(normalize_energy(e, grid), grid) == doctest::Approx(e).epsilon(1e-12));
        CHECK(denormalize_price(normalize_price(p, grid), grid) == doctest::Approx(p).epsilon(1e-12));
    }
}
