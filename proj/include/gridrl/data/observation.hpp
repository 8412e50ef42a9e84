#pragma once

#include <optional>
#include <vector>

#include "gridrl/data/time_series.hpp"
#include "gridrl/env/grid_config.hpp"

namespace gridrl::data {

/// Agent state vector, every component scaled into [0, 1].
/// 8 components without forecasts, 12 with.
struct Observation {
    enum Index {
        kCharge = 0,
        kDemand,
        kPrice,
        kPv,
        kWt,
        kHourOfDay,
        kHourOfWeek,
        kWorkday,
        kDemandNext,
        kPvNext,
        kWtNext,
        kPriceNext,
    };

    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Next-hour predictions, already on the normalized [0,1] scale.
struct Forecasts {
    double demand = 0.0;
    double pv = 0.0;
    double wt = 0.0;
    double price = 0.0;
};

// Scalers. Charge, demand and both generation values share the battery
// capacity as denominator; price uses the market cap.
double normalize_energy(double mwh, const env::GridConfig& grid);
double normalize_price(double gbp_mwh, const env::GridConfig& grid);
double denormalize_energy(double scaled, const env::GridConfig& grid);
double denormalize_price(double scaled, const env::GridConfig& grid);

// Weather scalers used by the forecast features.
double normalize_temp(double celsius);      // -20..45 C mapped onto [0,1], clamped
double normalize_humidity(double fraction);
double normalize_clearness(double fraction);

/// Builds the observation for one step.
/// pv_mw / wt_mw are the renewable outputs already computed for the record.
/// Throws ContractViolation if any raw value falls outside its physical bounds.
Observation normalize_observation(double charge_mwh, const TimeSeriesRecord& record, double pv_mw,
                                  double wt_mw, const env::GridConfig& grid,
                                  const HolidayCalendar& holidays,
                                  const std::optional<Forecasts>& forecasts = std::nullopt);

}  // namespace gridrl::data
