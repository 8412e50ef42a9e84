#include "gridrl/data/observation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridrl::data {

double normalize_energy(double mwh, const env::GridConfig& grid) {
    return mwh / grid.c_max_mwh;
}

double normalize_price(double gbp_mwh, const env::GridConfig& grid) {
    return gbp_mwh / grid.p_max;
}

double denormalize_energy(double scaled, const env::GridConfig& grid) {
    return scaled * grid.c_max_mwh;
}

double denormalize_price(double scaled, const env::GridConfig& grid) {
    return scaled * grid.p_max;
}

double normalize_temp(double celsius) {
    return std::clamp((celsius + 20.0) / 65.0, 0.0, 1.0);
}

double normalize_humidity(double fraction) { return std::clamp(fraction, 0.0, 1.0); }

double normalize_clearness(double fraction) { return std::clamp(fraction, 0.0, 1.0); }

namespace {

double checked(double value, double lo, double hi, const char* name) {
    if (!(value >= lo && value <= hi) || std::isnan(value)) {
        throw ContractViolation(std::string("observation component '") + name +
                                "' out of bounds: " + std::to_string(value));
    }
    return value;
}

}  // namespace

Observation normalize_observation(double charge_mwh, const TimeSeriesRecord& record, double pv_mw,
                                  double wt_mw, const env::GridConfig& grid,
                                  const HolidayCalendar& holidays,
                                  const std::optional<Forecasts>& forecasts) {
    Observation obs;
    obs.values.reserve(forecasts ? 12 : 8);

    const double cmax = grid.c_max_mwh;
    obs.values.push_back(checked(charge_mwh / cmax, 0.0, 1.0, "charge"));
    obs.values.push_back(checked(record.demand_mwh / cmax, 0.0, 1.0, "demand"));
    obs.values.push_back(checked(record.price_gbp_mwh / grid.p_max, 0.0, 1.0, "price"));
    obs.values.push_back(checked(pv_mw / cmax, 0.0, 1.0, "pv"));
    obs.values.push_back(checked(wt_mw / cmax, 0.0, 1.0, "wt"));
    // hours begin at 0 and end at 1 across the day / week
    obs.values.push_back(hour_of_day(record.epoch_hour) / 23.0);
    obs.values.push_back(hour_of_week(record.epoch_hour) / 167.0);
    obs.values.push_back(static_cast<double>(workday_flag(record.epoch_hour, holidays)));

    if (forecasts) {
        obs.values.push_back(checked(forecasts->demand, 0.0, 1.0, "demand_next"));
        obs.values.push_back(checked(forecasts->pv, 0.0, 1.0, "pv_next"));
        obs.values.push_back(checked(forecasts->wt, 0.0, 1.0, "wt_next"));
        obs.values.push_back(checked(forecasts->price, 0.0, 1.0, "price_next"));
    }
    return obs;
}

}  // namespace gridrl::data
